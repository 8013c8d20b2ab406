//! Property-based invariants across presentations, measures, and walks.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use walklab::enumeration::moebius_root_volume;
use walklab::group::{Generator, GroupPresentation, Word};
use walklab::inequality::q_ratio;
use walklab::walks::{
    convolve_power, entropy_rate, sample_walk, EstimateCI, MethodTag, SymmetricMeasure,
};

fn presentation_strategy() -> impl Strategy<Value = GroupPresentation> {
    (
        prop_oneof![
            Just("free"),
            Just("abelian"),
            Just("lfgroup"),
            Just("lfsemigroup")
        ],
        1u32..=4,
    )
        .prop_map(|(kind, k)| format!("{kind}:{k}").parse().unwrap())
}

/// A presentation together with a word over its alphabet.
fn word_strategy(max_len: usize) -> impl Strategy<Value = (GroupPresentation, Vec<Generator>)> {
    presentation_strategy().prop_flat_map(move |p| {
        let alphabet = p.alphabet();
        proptest::collection::vec(0..alphabet.len(), 0..=max_len)
            .prop_map(move |idx| (p, idx.iter().map(|&i| alphabet[i]).collect()))
    })
}

/// A group presentation with a random full-support symmetric measure.
fn measure_strategy() -> impl Strategy<Value = (GroupPresentation, SymmetricMeasure)> {
    (
        prop_oneof![Just("free:2"), Just("lfgroup:3"), Just("lfsemigroup:3")],
        proptest::collection::vec(0.05..1.0f64, 3),
    )
        .prop_map(|(spec, raw)| {
            let p: GroupPresentation = spec.parse().unwrap();
            let weights: Vec<(Generator, f64)> = p
                .alphabet()
                .into_iter()
                .zip(raw.iter().cycle())
                .map(|(get, &w)| (get, w))
                .collect();
            let (mu, _) = SymmetricMeasure::from_raw_weights(p, &weights).unwrap();
            (p, mu)
        })
}

proptest! {
    #[test]
    fn normalization_is_idempotent_and_never_lengthens(
        (p, letters) in word_strategy(8)
    ) {
        let w = Word(letters.clone());
        let nf = p.normalize(&w).unwrap();
        prop_assert!(nf.len() <= letters.len());
        let again = p.normalize(&nf.to_word()).unwrap();
        prop_assert_eq!(&again, &nf);
    }

    #[test]
    fn normal_forms_are_invariant_under_legal_rewrites(
        (p, letters) in word_strategy(8),
        pos in 0usize..64,
    ) {
        let nf = p.normalize(&Word(letters.clone())).unwrap();

        // An adjacent commuting swap never changes the element.
        let swaps: Vec<usize> = (0..letters.len().saturating_sub(1))
            .filter(|&i| p.commutes(letters[i], letters[i + 1]))
            .collect();
        if !swaps.is_empty() {
            let i = swaps[pos % swaps.len()];
            let mut rewritten = letters.clone();
            rewritten.swap(i, i + 1);
            prop_assert_eq!(p.normalize(&Word(rewritten)).unwrap(), nf.clone());
        }

        // Inserting g g^-1 anywhere never changes the element (groups).
        if p.is_group() {
            let alphabet = p.alphabet();
            let g = alphabet[pos % alphabet.len()];
            let at = pos % (letters.len() + 1);
            let mut padded = letters.clone();
            padded.insert(at, g.inverse());
            padded.insert(at, g);
            prop_assert_eq!(p.normalize(&Word(padded)).unwrap(), nf);
        }
    }

    #[test]
    fn multiplication_is_associative(
        (p, a) in word_strategy(5),
        more in proptest::collection::vec(0usize..64, 2),
    ) {
        let alphabet = p.alphabet();
        let mk = |codes: &[usize]| -> Vec<Generator> {
            codes.iter().map(|&c| alphabet[c % alphabet.len()]).collect()
        };
        let x = p.normalize(&Word(a)).unwrap();
        let y = p.normalize(&Word(mk(&[more[0], more[1]]))).unwrap();
        let z = p.normalize(&Word(mk(&[more[1], more[0] / 2]))).unwrap();
        let xy_z = p.multiply(&p.multiply(&x, &y).unwrap(), &z).unwrap();
        let x_yz = p.multiply(&x, &p.multiply(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(xy_z, x_yz);
    }

    #[test]
    fn inversion_is_an_involutive_antihomomorphism(
        (p, a) in word_strategy(6),
        b_codes in proptest::collection::vec(0usize..64, 0..6),
    ) {
        if !p.is_group() {
            return Ok(());
        }
        let alphabet = p.alphabet();
        let b: Vec<Generator> = b_codes.iter().map(|&c| alphabet[c % alphabet.len()]).collect();
        let x = p.normalize(&Word(a)).unwrap();
        let y = p.normalize(&Word(b)).unwrap();
        prop_assert_eq!(p.invert(&p.invert(&x).unwrap()).unwrap(), x.clone());
        let lhs = p.invert(&p.multiply(&x, &y).unwrap()).unwrap();
        let rhs = p
            .multiply(&p.invert(&y).unwrap(), &p.invert(&x).unwrap())
            .unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert!(p.multiply(&x, &p.invert(&x).unwrap()).unwrap().is_identity());
    }

    #[test]
    fn walks_reproduce_exactly_under_a_fixed_seed(seed in any::<u64>(), steps in 1u32..80) {
        let p: GroupPresentation = "free:2".parse().unwrap();
        let mu = SymmetricMeasure::uniform(p);
        let a = sample_walk(p, &mu, steps, seed);
        let b = sample_walk(p, &mu, steps, seed);
        prop_assert_eq!(a.lengths, b.lengths);
    }

    #[test]
    fn q_is_invariant_under_log_base_rescaling(
        h in 0.05..2.0f64,
        l in 0.1..0.9f64,
        v in 0.5..3.0f64,
        scale in 0.1..4.0f64,
    ) {
        let h = h.min(0.99 * l * v);
        let ci = |value: f64| EstimateCI {
            value,
            std_error: 0.0,
            samples: 1,
            method: MethodTag::ExactIncrementSpread,
        };
        let vol = |bits: f64| walklab::enumeration::VolumeEstimate {
            bits_per_step: bits,
            method: walklab::enumeration::VolumeMethod::ClosedForm,
            uncertainty: 0.0,
            window: None,
        };
        let q1 = q_ratio(&ci(h), &ci(l), &vol(v)).unwrap();
        let q2 = q_ratio(&ci(h * scale), &ci(l), &vol(v * scale)).unwrap();
        prop_assert!((q1.value - q2.value).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn convolution_entropies_are_subadditive((p, mu) in measure_strategy()) {
        let profile = entropy_rate(p, &mu, 6, 200_000).unwrap();
        let h = &profile.entropies;
        for i in 1..=h.len() {
            for j in 1..=h.len() {
                if i + j <= h.len() {
                    prop_assert!(
                        h[i + j - 1] <= h[i - 1] + h[j - 1] + 1e-9,
                        "H_{} = {} > H_{} + H_{} = {}",
                        i + j, h[i + j - 1], i, j, h[i - 1] + h[j - 1]
                    );
                }
            }
        }
        // The estimate never exceeds the Cesaro envelope.
        let envelope = profile
            .cesaro
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        prop_assert!(profile.estimate.value <= envelope + 1e-6);
    }

    #[test]
    fn symmetric_measures_give_symmetric_distributions((p, mu) in measure_strategy()) {
        if !p.is_group() {
            return Ok(());
        }
        for n in 1..=4u32 {
            let d = convolve_power(p, &mu, n, 200_000).unwrap();
            prop_assert!((d.mass() - 1.0).abs() < 1e-9);
            for (x, &px) in d.table() {
                let inv = p.invert(x).unwrap();
                let pinv = d.probability(&inv);
                prop_assert!(
                    (px - pinv).abs() < 1e-12,
                    "P({x}) = {px} but P({inv}) = {pinv} at n = {n}"
                );
            }
        }
    }
}

#[test]
fn group_walk_supports_grow_with_the_parity_preserved() {
    for spec in ["free:2", "lfgroup:3"] {
        let p: GroupPresentation = spec.parse().unwrap();
        let mu = SymmetricMeasure::uniform(p);
        let dists: Vec<_> = (1..=6)
            .map(|n| convolve_power(p, &mu, n, 500_000).unwrap())
            .collect();
        for n in 0..dists.len() - 2 {
            for (x, &px) in dists[n].table() {
                assert!(px > 0.0);
                assert!(
                    dists[n + 2].probability(x) > 0.0,
                    "{spec}: {x} in support at n = {} but not n = {}",
                    n + 1,
                    n + 3
                );
            }
        }
    }
}

#[test]
fn semigroup_distributions_live_on_words_of_exact_length() {
    let p: GroupPresentation = "lfsemigroup:4".parse().unwrap();
    let mu = SymmetricMeasure::uniform(p);
    for n in 1..=6u32 {
        let d = convolve_power(p, &mu, n, 500_000).unwrap();
        for x in d.table().keys() {
            assert_eq!(x.len() as u32, n);
        }
    }
}

#[test]
fn semigroup_growth_exponent_is_monotone_in_rank_and_below_two_bits() {
    let mut last = 0.0;
    for k in 1..=12 {
        let v = moebius_root_volume(k).unwrap().bits_per_step;
        assert!(v > last, "v({k}) = {v} not above v({}) = {last}", k - 1);
        assert!(v < 2.0);
        last = v;
    }
}

#[test]
fn distinct_seeds_give_distinct_trajectories() {
    let p: GroupPresentation = "free:2".parse().unwrap();
    let mu = SymmetricMeasure::uniform(p);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let s: u64 = rng.random();
        let a = sample_walk(p, &mu, 64, s);
        let b = sample_walk(p, &mu, 64, s.wrapping_add(1));
        assert_ne!(a.lengths, b.lengths);
    }
}
