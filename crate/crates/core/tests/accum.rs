use gsql_core::accum::{default_value, reduce_bag, AccType, AccumValue, HeapCapacity, HeapKey, HeapSpec, MapValType};
use gsql_core::{Type, Value};
use proptest::prelude::*;
use proptest::test_runner::Config;

fn heap(desc: bool) -> AccType {
    AccType::Heap(HeapSpec {
        capacity: HeapCapacity::Fixed(3),
        elem: Type::Int,
        keys: vec![HeapKey { name: String::new(), field: None, desc }],
    })
}

/// Every order-invariant type, each paired with how to lift an int input.
fn invariant_types() -> Vec<(AccType, fn(i64) -> Value)> {
    let int: fn(i64) -> Value = Value::Int;
    let boolean: fn(i64) -> Value = |x| Value::Bool(x % 2 == 0);
    let pair: fn(i64) -> Value = |x| Value::tuple(vec![Value::Int(x % 4), Value::Int(x)]);
    vec![
        (AccType::Sum(Type::Int), int),
        (AccType::Min(Type::Int), int),
        (AccType::Max(Type::Int), int),
        (AccType::Avg, int),
        (AccType::Or, boolean),
        (AccType::And, boolean),
        (AccType::Set(Type::Int), int),
        (AccType::Bag(Type::Int), int),
        (AccType::Map(Type::Int, MapValType::Acc(Box::new(AccType::Sum(Type::Int)))), pair),
        (heap(false), int),
        (heap(true), int),
    ]
}

proptest! {
    #![proptest_config(Config::with_cases(200))]

    /// Any permutation of a bag reduces to the same state. Avg state is
    /// compared as (sum, count), so the check is exact.
    #[test]
    fn reduction_ignores_input_order(
        bag in prop::collection::vec(-50i64..50, 0..24),
        perms in prop::collection::vec(Just(()).prop_perturb(|_, mut rng| rng.next_u64()), 5),
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        for (ty, lift) in invariant_types() {
            prop_assert!(ty.order_invariant(), "{:?}", ty);
            let inputs: Vec<Value> = bag.iter().map(|&x| lift(x)).collect();
            let want = reduce_bag(&ty, default_value(&ty), &inputs).unwrap();
            for &seed in &perms {
                let mut shuffled = inputs.clone();
                shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
                let got = reduce_bag(&ty, default_value(&ty), &shuffled).unwrap();
                prop_assert_eq!(&got, &want, "{:?}", ty);
            }
        }
    }
}

#[test]
fn list_and_base_map_are_order_sensitive() {
    assert!(!AccType::List(Type::Int).order_invariant());
    assert!(!AccType::Map(Type::Int, MapValType::Base(Type::Int)).order_invariant());
    let ty = AccType::List(Type::Int);
    let a = reduce_bag(&ty, default_value(&ty), &[Value::Int(1), Value::Int(2)]).unwrap();
    let b = reduce_bag(&ty, default_value(&ty), &[Value::Int(2), Value::Int(1)]).unwrap();
    assert_ne!(a, b);
}

#[test]
fn avg_keeps_sum_and_count() {
    let ty = AccType::Avg;
    let s = reduce_bag(&ty, default_value(&ty), &[Value::Int(1), Value::Int(2), Value::Int(6)]).unwrap();
    assert_eq!(s, AccumValue::Avg { sum: 9.0, count: 3 });
}
