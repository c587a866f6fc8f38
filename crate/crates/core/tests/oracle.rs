use std::collections::BTreeSet;

use sqmul::repr::{count, enumerate, exceptional_set, is_representable, verify_dubouis, ReprTable};

/// Non-increasing tuples of `k` positive integers whose squares sum to `n`,
/// by plain nested loops.
fn naive(n: u64, k: usize) -> Vec<Vec<u64>> {
    fn go(n: u64, k: usize, max: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if k == 0 {
            if n == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for x in (1..=max).rev() {
            if x * x > n {
                continue;
            }
            prefix.push(x);
            go(n - x * x, k - 1, x, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    let mut max = 0;
    while (max + 1) * (max + 1) <= n {
        max += 1;
    }
    go(n, k, max, &mut Vec::new(), &mut out);
    out
}

#[test]
fn enumeration_matches_nested_loops() {
    for k in 1..=6 {
        for n in 1..=300 {
            let expected = naive(n, k);
            let got: Vec<Vec<u64>> = enumerate(n, k, usize::MAX)
                .representations
                .iter()
                .map(|r| r.parts().to_vec())
                .collect();
            assert_eq!(got, expected, "n = {n}, k = {k}");
            assert_eq!(count(n, k), expected.len() as u128);
            assert_eq!(is_representable(n, k), !expected.is_empty());
            let distinct: BTreeSet<&Vec<u64>> = got.iter().collect();
            assert_eq!(distinct.len(), got.len());
        }
    }
}

#[test]
fn exceptional_sets_agree_with_closed_forms() {
    for k in 4..=12 {
        let r = verify_dubouis(k, 2000).unwrap();
        assert!(r.agree, "k = {k}: {:?} vs {:?}", r.computed, r.closed_form);
    }
    let small: Vec<u64> = exceptional_set(4, 50);
    assert_eq!(small, [1, 2, 3, 5, 6, 8, 9, 11, 14, 17, 24, 29, 32, 41]);
    assert!(!is_representable(33, 5));
}

#[test]
fn bounded_enumeration_only_uses_small_parts() {
    let mut t = ReprTable::new();
    for n in 7..=40u64 {
        let e = t.enumerate_bounded(n * (n - 1), 5, n - 1, 1);
        let rep = e.representations.first().expect("representable below n");
        assert!(rep.parts().iter().all(|&x| x < n));
    }
}
