//! Toric surfaces of Picard number one with three singular points.

use num_integer::Integer;
use num_rational::Ratio;
use serde::Serialize;

use crate::{q, Rational};

/// The fan `(1,0), (1,r), (-c,q)`: indices `(rc - q, q, r)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ToricFamily {
    pub r: i64,
    pub c: i64,
    pub q: i64,
    pub indices: (i64, i64, i64),
    #[serde(serialize_with = "crate::exact::ser_q")]
    pub k_squared: Rational,
}

/// `K² = (p+q+r)² / (pqr)`.
pub fn toric_k2(p: i64, q_: i64, r: i64) -> Rational {
    assert!(p >= 1 && q_ >= 1 && r >= 1, "indices are positive");
    let s = p + q_ + r;
    q(s * s, p * q_ * r)
}

fn members(r: i64, cap_q: i64, cap_c: i64) -> impl Iterator<Item = (i64, i64, i64)> {
    (1..=cap_q).flat_map(move |qq| {
        (1..=cap_c).filter_map(move |c| {
            let p = r * c - qq;
            (p > 0 && c.gcd(&qq) == 1).then_some((c, qq, p))
        })
    })
}

/// All members with `q ≤ cap_q` and `c ≤ cap_c`.
pub fn toric_density_sample(r: i64, cap_q: i64, cap_c: i64) -> Vec<ToricFamily> {
    members(r, cap_q, cap_c)
        .map(|(c, qq, p)| ToricFamily { r, c, q: qq, indices: (p, qq, r), k_squared: toric_k2(p, qq, r) })
        .collect()
}

/// Largest gap between consecutive distinct `K²` values of the sample lying in `(lo, hi)`.
pub fn toric_max_gap(r: i64, cap_q: i64, cap_c: i64, lo: &Rational, hi: &Rational) -> Option<Rational> {
    let to_small = |x: &Rational| -> Ratio<i128> {
        Ratio::new(
            i128::try_from(x.numer()).expect("bound fits"),
            i128::try_from(x.denom()).expect("bound fits"),
        )
    };
    let (lo, hi) = (to_small(lo), to_small(hi));
    let mut vals: Vec<Ratio<i128>> = members(r, cap_q, cap_c)
        .filter_map(|(_, qq, p)| {
            let s = (p + qq + r) as i128;
            let v = Ratio::new(s * s, (p * qq * r) as i128);
            (v > lo && v < hi).then_some(v)
        })
        .collect();
    vals.sort_unstable();
    vals.dedup();
    vals.windows(2)
        .map(|w| w[1] - w[0])
        .max()
        .map(|g| Rational::new((*g.numer()).into(), (*g.denom()).into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qi;

    #[test]
    fn small_values() {
        assert_eq!(toric_k2(1, 1, 1), qi(9));
        assert_eq!(toric_k2(2, 1, 1), qi(8));
        assert_eq!(toric_k2(3, 3, 3), qi(3));
    }

    #[test]
    fn plane_in_family() {
        let s = toric_density_sample(1, 3, 3);
        let m = s.iter().find(|f| f.c == 2 && f.q == 1).unwrap();
        assert_eq!(m.indices, (1, 1, 1));
        assert_eq!(m.k_squared, qi(9));
    }
}
