#![allow(dead_code)]

use bcidx_core::gen::Gen;
use bcidx_core::term::Term;
use proptest::prelude::*;

/// Message terms of roughly 1..=max nodes, drawn through [`Gen`].
pub fn message(max: usize) -> impl Strategy<Value = Term> {
    (any::<u64>(), 1..=max).prop_map(|(s, n)| Gen::new(s).term(n))
}

pub fn boolean(max: usize) -> impl Strategy<Value = Term> {
    (any::<u64>(), 1..=max).prop_map(|(s, n)| Gen::new(s).bool_term(n))
}

pub fn any_sort(max: usize) -> impl Strategy<Value = Term> {
    (any::<u64>(), 1..=max).prop_map(|(s, n)| Gen::new(s).any_term(n))
}

pub fn seed() -> impl Strategy<Value = u64> {
    any::<u64>()
}
