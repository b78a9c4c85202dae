use itertools::Itertools;
use proptest::prelude::*;
use shleib::graded::tensor::{apply_tensor_map_all, Identity, Letter, LetterMap, LetterTensor};
use shleib::graded::{anti_koszul_sign, koszul_sign, unshuffles};
use shleib::{Permutation, Scalar, Shift};

fn all_perms(n: usize) -> Vec<Permutation> {
    (1..=n)
        .permutations(n)
        .map(|p| Permutation::new(p).unwrap())
        .collect()
}

fn degree_lists(n: usize, values: &[i64]) -> Vec<Vec<i64>> {
    (0..n)
        .map(|_| values.iter().copied())
        .multi_cartesian_product()
        .collect()
}

// Sign from the inversion set directly: every pair of letters that ends up
// in the opposite order contributes (-1)^{ab}.
fn koszul_by_inversions(sigma: &Permutation, degrees: &[i64]) -> Scalar {
    let im = sigma.images();
    let mut e = 0;
    for a in 0..im.len() {
        for b in a + 1..im.len() {
            if im[a] > im[b] {
                e += degrees[im[a] - 1] * degrees[im[b] - 1];
            }
        }
    }
    Scalar::sign(e)
}

#[test]
fn koszul_sign_is_a_homomorphism() {
    for n in 0..=4 {
        let perms = all_perms(n);
        for d in degree_lists(n, &[0, 1, 2]) {
            for sigma in &perms {
                for tau in &perms {
                    let lhs = koszul_sign(&sigma.compose(tau).unwrap(), &d).unwrap();
                    let rhs = koszul_sign(sigma, &tau.permute(&d)).unwrap()
                        * koszul_sign(tau, &d).unwrap();
                    assert_eq!(lhs, rhs, "sigma {sigma:?} tau {tau:?} degrees {d:?}");
                }
            }
        }
    }
}

#[test]
fn koszul_sign_does_not_depend_on_the_decomposition() {
    for sigma in all_perms(4) {
        for d in degree_lists(4, &[0, 1]) {
            assert_eq!(
                koszul_sign(&sigma, &d).unwrap(),
                koszul_by_inversions(&sigma, &d)
            );
        }
    }
}

#[test]
fn anti_koszul_flips_every_inversion() {
    for sigma in all_perms(4) {
        let inversions = sigma
            .images()
            .iter()
            .tuple_combinations()
            .filter(|(a, b)| a > b)
            .count() as i64;
        for d in degree_lists(4, &[0, 1, 2]) {
            let expected = Scalar::sign(inversions) * koszul_by_inversions(&sigma, &d);
            assert_eq!(anti_koszul_sign(&sigma, &d).unwrap(), expected);
        }
    }
}

#[test]
fn unshuffles_match_brute_force() {
    for n in 0..=6 {
        for p in 0..=n {
            let q = n - p;
            let brute: Vec<Permutation> = all_perms(n)
                .into_iter()
                .filter(|s| {
                    let im = s.images();
                    im[..p].windows(2).all(|w| w[0] < w[1])
                        && im[p..].windows(2).all(|w| w[0] < w[1])
                })
                .sorted()
                .collect();
            let got = unshuffles(p, q);
            let binom = (1..=p).fold(1usize, |acc, k| acc * (q + k) / k);
            assert_eq!(got.len(), binom);
            assert_eq!(got, brute, "({p},{q})-unshuffles");
        }
    }
}

fn compose_maps(
    basis: &shleib::GradedBasis,
    steps: &[[&dyn LetterMap; 2]],
    word: [Letter; 2],
) -> LetterTensor {
    let mut t: LetterTensor = vec![(word.to_vec(), Scalar::one())];
    for maps in steps.iter().rev() {
        t = apply_tensor_map_all(basis, maps, &t);
    }
    t
}

#[test]
fn shift_sign_rule_on_fixture_pairs() {
    let s = Shift::Raise;
    for (name, doc) in shleib::fixtures::valid_documents() {
        let basis = doc.model().unwrap().basis;
        for (x, y) in (0..basis.dim()).cartesian_product(0..basis.dim()) {
            let w = [Letter::new(x, 0), Letter::new(y, 0)];
            let ss = compose_maps(&basis, &[[&s, &s]], w);
            let s1_1s = compose_maps(&basis, &[[&s, &Identity], [&Identity, &s]], w);
            let one_s_s1 = compose_maps(&basis, &[[&Identity, &s], [&s, &Identity]], w);
            assert_eq!(ss, s1_1s, "{name}: ({x},{y})");
            let negated: LetterTensor = one_s_s1.into_iter().map(|(w, c)| (w, -c)).collect();
            assert_eq!(ss, negated, "{name}: ({x},{y})");
            // (s (x) s)(x (x) y) = (-1)^{|x|} sx (x) sy
            assert_eq!(ss[0].1, Scalar::sign(basis.degree(x)));
        }
    }
}

fn perm_strategy(max: usize) -> impl Strategy<Value = (Permutation, Permutation, Vec<i64>)> {
    (1..=max).prop_flat_map(|n| {
        (
            Just((1..=n).collect::<Vec<_>>()).prop_shuffle(),
            Just((1..=n).collect::<Vec<_>>()).prop_shuffle(),
            prop::collection::vec(-3i64..=3, n),
        )
            .prop_map(|(a, b, d)| {
                (
                    Permutation::new(a).unwrap(),
                    Permutation::new(b).unwrap(),
                    d,
                )
            })
    })
}

proptest! {
    #[test]
    fn homomorphism_on_larger_words((sigma, tau, d) in perm_strategy(7)) {
        let lhs = koszul_sign(&sigma.compose(&tau).unwrap(), &d).unwrap();
        let rhs = koszul_sign(&sigma, &tau.permute(&d)).unwrap() * koszul_sign(&tau, &d).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(koszul_sign(&sigma, &d).unwrap(), koszul_by_inversions(&sigma, &d));
    }

    #[test]
    fn scalars_print_and_parse_back(n in -10_000i64..10_000, m in 1i64..10_000) {
        let q = Scalar::new(n, m).unwrap();
        let text = q.to_string();
        prop_assert_eq!(text.parse::<Scalar>().unwrap(), q.clone());
        prop_assert_eq!(q.clone() * Scalar::from_int(m), Scalar::from_int(n));
    }
}

#[test]
fn malformed_rationals_are_rejected() {
    for bad in ["", "1/0", "a", "1/2/3", "0x1", "1.5", "/2"] {
        assert!(bad.parse::<Scalar>().is_err(), "{bad:?}");
    }
    assert_eq!("6/4".parse::<Scalar>().unwrap(), Scalar::new(3, 2).unwrap());
    assert_eq!("-0/5".parse::<Scalar>().unwrap(), Scalar::zero());
}
