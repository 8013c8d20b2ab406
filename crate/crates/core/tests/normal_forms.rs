//! Cross-checks canonical forms against an independent rewrite-closure
//! oracle.
//!
//! The oracle knows nothing about the incremental normalization strategy:
//! it explores the full closure of a word under length-preserving moves
//! (adjacent commuting swaps) and length-reducing moves (adjacent inverse
//! cancellations, groups only), then picks the length-lexicographically
//! smallest representative. In these partially commutative structures
//! every non-geodesic word admits a cancellation after finitely many
//! swaps, and all geodesic spellings of one element are connected by
//! swaps, so the closure minimum is the canonical form.

use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use walklab::group::{Generator, GroupPresentation, Word};

/// Commutation relation re-stated from the definitions, not taken from
/// the library: free means never, abelian means always, locally free
/// means index distance at least 2.
fn oracle_commutes(tag: &str, a: Generator, b: Generator) -> bool {
    match tag {
        "free" => false,
        "abelian" => true,
        "lfgroup" | "lfsemigroup" => a.index().abs_diff(b.index()) >= 2,
        other => panic!("unknown presentation tag {other}"),
    }
}

fn oracle_normal_form(p: GroupPresentation, word: &[Generator]) -> Vec<Generator> {
    let tag = p.kind().tag();
    let is_group = p.is_group();
    let mut seen: BTreeSet<Vec<Generator>> = BTreeSet::new();
    let mut queue: VecDeque<Vec<Generator>> = VecDeque::new();
    seen.insert(word.to_vec());
    queue.push_back(word.to_vec());

    while let Some(w) = queue.pop_front() {
        for i in 0..w.len().saturating_sub(1) {
            if w[i] != w[i + 1] && oracle_commutes(tag, w[i], w[i + 1]) {
                let mut u = w.clone();
                u.swap(i, i + 1);
                if seen.insert(u.clone()) {
                    queue.push_back(u);
                }
            }
            if is_group && w[i + 1] == w[i].inverse() {
                let mut u = w.clone();
                u.remove(i);
                u.remove(i);
                if seen.insert(u.clone()) {
                    queue.push_back(u);
                }
            }
        }
    }

    seen.into_iter()
        .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
        .expect("closure contains the input")
}

fn check_against_oracle(p: GroupPresentation, word: &[Generator]) {
    let got = p.normalize(&Word(word.to_vec())).unwrap();
    let want = oracle_normal_form(p, word);
    assert_eq!(
        got.letters(),
        want.as_slice(),
        "presentation {p}, input {:?}",
        Word(word.to_vec()).to_string()
    );
}

/// All words over the alphabet up to the given length, in counting order.
fn all_words(alphabet: &[Generator], max_len: usize) -> Vec<Vec<Generator>> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<Generator>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * alphabet.len());
        for w in &layer {
            for &g in alphabet {
                let mut u = w.clone();
                u.push(g);
                next.push(u);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn random_word<R: Rng>(alphabet: &[Generator], max_len: usize, rng: &mut R) -> Vec<Generator> {
    let len = rng.random_range(0..=max_len);
    (0..len)
        .map(|_| alphabet[rng.random_range(0..alphabet.len())])
        .collect()
}

#[test]
fn exhaustive_small_words_match_the_rewrite_closure() {
    for spec in ["free:2", "abelian:2", "lfgroup:3", "lfsemigroup:3"] {
        let p: GroupPresentation = spec.parse().unwrap();
        for w in all_words(&p.alphabet(), 4) {
            check_against_oracle(p, &w);
        }
    }
}

#[test]
fn exhaustive_rank_four_group_words_match_the_rewrite_closure() {
    let p: GroupPresentation = "lfgroup:4".parse().unwrap();
    for w in all_words(&p.alphabet(), 3) {
        check_against_oracle(p, &w);
    }
}

#[test]
fn random_longer_words_match_the_rewrite_closure() {
    let cases = [("lfgroup:4", 6usize, 1500u64), ("lfsemigroup:5", 7, 800)];
    for (spec, max_len, samples) in cases {
        let p: GroupPresentation = spec.parse().unwrap();
        let alphabet = p.alphabet();
        let mut rng = ChaCha8Rng::seed_from_u64(0x6f72_6163_6c65);
        for _ in 0..samples {
            let w = random_word(&alphabet, max_len, &mut rng);
            check_against_oracle(p, &w);
        }
    }
}

#[test]
fn multiplication_agrees_with_concatenation_on_random_words() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for spec in ["free:3", "abelian:3", "lfgroup:4", "lfsemigroup:4"] {
        let p: GroupPresentation = spec.parse().unwrap();
        let alphabet = p.alphabet();
        for _ in 0..500 {
            let u = random_word(&alphabet, 6, &mut rng);
            let v = random_word(&alphabet, 6, &mut rng);
            let x = p.normalize(&Word(u.clone())).unwrap();
            let y = p.normalize(&Word(v.clone())).unwrap();
            let product = p.multiply(&x, &y).unwrap();
            let mut uv = u.clone();
            uv.extend_from_slice(&v);
            let direct = p.normalize(&Word(uv)).unwrap();
            assert_eq!(product, direct, "{p}: {x} * {y}");
        }
    }
}

#[test]
fn inverses_cancel_to_the_identity_on_random_words() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for spec in ["free:2", "abelian:2", "lfgroup:4"] {
        let p: GroupPresentation = spec.parse().unwrap();
        let alphabet = p.alphabet();
        for _ in 0..500 {
            let w = random_word(&alphabet, 8, &mut rng);
            let x = p.normalize(&Word(w)).unwrap();
            let xi = p.invert(&x).unwrap();
            assert!(p.multiply(&x, &xi).unwrap().is_identity());
            assert!(p.multiply(&xi, &x).unwrap().is_identity());
            assert_eq!(p.invert(&xi).unwrap(), x);
        }
    }
}

#[test]
fn canonical_forms_are_geodesic_and_least_in_their_closure() {
    // Directly verify the two halves of the canonical-form contract on a
    // mixed bag of handwritten words.
    let p: GroupPresentation = "lfgroup:4".parse().unwrap();
    let words = [
        "z3 z1 z2",
        "z1 z3 z1^-1 z3^-1",
        "z4 z2 z4^-1 z1",
        "z2 z4 z1 z3 z2^-1",
        "z1 z1 z1^-1 z2",
        "z4 z3 z2 z1",
    ];
    for text in words {
        let w = Word::parse(text).unwrap();
        let nf = p.normalize(&w).unwrap();
        let closure_min = oracle_normal_form(p, &w.0);
        assert_eq!(nf.letters(), closure_min.as_slice(), "{text}");
        assert!(nf.len() <= w.0.len());
    }
}
