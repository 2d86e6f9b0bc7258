use ltsurf::config::{k_dot, log_pullback, parse_program, q_intersection, q_self, Boundary, SurfaceModel};
use ltsurf::criteria::{contraction_tables, toric_density_sample, toric_k2};
use ltsurf::exact::{Eps, Matrix};
use ltsurf::singularity::{
    boundary_coefficient_chain, chain_index_of, lt_chains, lt_stars, spectral_value, star_coefficient, suspend,
    ChainSingularity, DualTree,
};
use ltsurf::{q, qi, Rational};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..40, 1i64..12).prop_map(|(p, d)| q(p, d))
}

fn weights(max_len: usize, max_w: u32) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(2..=max_w, 1..=max_len)
}

fn discrepancies(w: &[u32]) -> Vec<Rational> {
    DualTree::chain(w).discrepancies().unwrap()
}

proptest! {
    #[test]
    fn solve_inverts_multiplication(
        n in 1usize..5,
        entries in prop::collection::vec(-6i64..7, 16),
        x in prop::collection::vec(rational(), 4),
    ) {
        let a = Matrix::from_fn(n, |i, j| qi(entries[i * 4 + j]));
        prop_assume!(!a.det().is_zero());
        let b = a.mul_vec(&x[..n]).unwrap();
        prop_assert_eq!(a.solve(&b).unwrap(), x[..n].to_vec());
    }

    #[test]
    fn infinitesimals_order_and_multiply(a in rational(), b in rational(), c in rational(), d in rational(), k in 1i64..9) {
        let x = Eps::new(a.clone(), b.clone());
        prop_assert!(x < x.clone() + Eps::epsilon().scale(&qi(k)));
        prop_assert!(x > x.clone() - Eps::epsilon().scale(&qi(k)));
        let y = Eps::new(c.clone(), d.clone());
        prop_assert_eq!(x * y, Eps::new(a.clone() * c.clone(), a * d + b * c));
    }

    #[test]
    fn chain_determinant_is_the_index(w in weights(7, 6)) {
        let t = DualTree::chain(&w);
        prop_assert_eq!(t.det().abs(), qi(chain_index_of(&w) as i64));
        prop_assert_eq!(t.det().abs(), t.matrix().det().abs());
        prop_assert!(t.is_negative_definite());
    }

    #[test]
    fn raising_a_weight_raises_every_coefficient(w in weights(6, 5), i in 0usize..6) {
        let i = i % w.len();
        let base = discrepancies(&w);
        let mut up = w.clone();
        up[i] += 1;
        prop_assert!(chain_index_of(&up) > chain_index_of(&w));
        for (a, b) in base.iter().zip(discrepancies(&up)) {
            prop_assert!(b > *a, "{w:?} -> {up:?}");
        }
    }

    #[test]
    fn lengthening_a_chain_raises_every_coefficient(w in weights(5, 5), x in 2u32..=5, left in any::<bool>()) {
        let longer = if left { [vec![x], w.clone()].concat() } else { [w.clone(), vec![x]].concat() };
        prop_assert!(chain_index_of(&longer) > chain_index_of(&w));
        prop_assume!(longer.iter().any(|&x| x > 2));
        let base = discrepancies(&w);
        let e = discrepancies(&longer);
        let kept = if left { &e[1..] } else { &e[..w.len()] };
        for (a, b) in base.iter().zip(kept) {
            prop_assert!(b > a, "{w:?} -> {longer:?}");
        }
    }

    #[test]
    fn spectral_value_survives_suspension(w in weights(7, 6)) {
        let c = ChainSingularity::marked(w).unwrap();
        let s = suspend(&c);
        prop_assert_eq!(spectral_value(&c).unwrap(), spectral_value(&s).unwrap());
        prop_assert_eq!(s.len(), c.len() + 1);
    }

    #[test]
    fn unmarked_chains_have_no_spectral_value(w in weights(5, 5)) {
        prop_assert!(spectral_value(&ChainSingularity::new(w).unwrap()).is_err());
    }
}

#[test]
fn chain_coefficients_lie_in_the_unit_interval() {
    for w in lt_chains(120, None) {
        let e = discrepancies(&w);
        assert!(e.iter().all(|x| !x.is_negative() && *x < Rational::one()), "{w:?}");
        let du_val = w.iter().all(|&x| x == 2);
        assert_eq!(e.iter().all(Zero::is_zero), du_val, "{w:?}");
    }
}

#[test]
fn boundary_coefficient_agrees_with_a_linear_solve() {
    let lambdas = [qi(0), q(1, 3), q(1, 2), q(2, 3), qi(1)];
    for w in lt_chains(100, None) {
        let c = ChainSingularity::marked(w.clone()).unwrap();
        for l in &lambdas {
            let b: Vec<Rational> = (0..w.len())
                .map(|i| -qi(w[i] as i64 - 2) - if i == 0 { l.clone() } else { Rational::zero() })
                .collect();
            let solved = DualTree::chain(&w).solve(&b).unwrap();
            assert_eq!(boundary_coefficient_chain(&c, l).unwrap(), solved[0], "{w:?} at {l}");
        }
    }
}

#[test]
fn star_centre_carries_the_largest_coefficient() {
    let stars = lt_stars(4, 6, None);
    assert!(!stars.is_empty());
    for s in stars {
        let c = star_coefficient(&s).unwrap();
        let e = s.tree().discrepancies().unwrap();
        assert_eq!(e.iter().max(), Some(&c), "{s}");
        let k = c.clone() / (Rational::one() - c);
        assert!(k.is_integer(), "{s}");
    }
}

#[test]
fn toric_degree_is_symmetric_and_positive() {
    for p in 1..6 {
        for qq in 1..6 {
            for r in 1..6 {
                let k = toric_k2(p, qq, r);
                assert!(k.is_positive());
                assert_eq!(k, toric_k2(qq, p, r));
                assert_eq!(k, toric_k2(r, qq, p));
            }
        }
    }
    let sample = toric_density_sample(1, 50, 20);
    assert!(!sample.is_empty());
    for f in sample {
        assert!(f.k_squared.is_positive());
        assert_eq!(f.k_squared, toric_k2(f.indices.0, f.indices.1, f.indices.2));
    }
}

#[test]
fn contraction_tables_are_nonempty_for_each_order() {
    let tables = contraction_tables(3).unwrap();
    for g in 1..=3 {
        assert!(tables.iter().any(|e| e.g == g), "order {g}");
    }
}

/// `K_T + Γ` is trivial on the divisor extracted by `T → S`.
fn check_log_pullback(s: &SurfaceModel, delta: &Boundary) {
    for e in &s.exceptional {
        let rest: Vec<String> = s.exceptional.iter().filter(|c| *c != e).cloned().collect();
        let t = s.with_exceptional(rest).unwrap();
        let gamma = log_pullback(s, delta, std::slice::from_ref(e)).unwrap();
        let mut total = k_dot(&t, e).unwrap();
        for c in gamma.support() {
            let v = gamma.get(&c);
            assert!(v.is_std());
            let dot = if c == *e { q_self(&t, e).unwrap() } else { q_intersection(&t, &c, e).unwrap() };
            total += v.std * dot;
        }
        assert!(total.is_zero(), "extracting {e} with {delta:?}");
    }
}

const TANGENT_CONIC: &str = "\
surface P2
curve A degree 1
curve B degree 2
point t on A B contact A:B=2
blowup t along B times 4
";

#[test]
fn log_pullback_is_crepant() {
    let s = parse_program(TANGENT_CONIC).unwrap().surface().unwrap();
    assert!(!s.exceptional.is_empty());
    for a in [qi(0), q(1, 4), q(2, 3)] {
        for b in [qi(0), q(1, 2)] {
            check_log_pullback(&s, &Boundary::from_rationals([("A", a.clone()), ("B", b)]));
        }
    }
}
