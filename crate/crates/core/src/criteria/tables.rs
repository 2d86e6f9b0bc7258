//! Values of `c` (and `d`) making `K_T + cX + dY` trivial on the contracted
//! `(-1)`-curve, for the local configurations over a node or a cusp of the
//! boundary.

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::config::{contract_to_surface, k_dot, parse_program, q_intersection, ConfigError, ContractionPolicy};
use crate::{fmt_q, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NodeType {
    Zero,
    I,
    /// `(II, x^(r-1))`; `r = 1` is configuration II.
    II(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CuspType {
    I,
    II,
    III,
    U,
    V,
    W,
    UN,
    VF,
    VF2,
    VN,
    VN2,
}

impl CuspType {
    pub const ALL: [CuspType; 11] = [
        CuspType::I,
        CuspType::II,
        CuspType::III,
        CuspType::U,
        CuspType::V,
        CuspType::W,
        CuspType::UN,
        CuspType::VF,
        CuspType::VF2,
        CuspType::VN,
        CuspType::VN2,
    ];

    pub fn label(self) -> &'static str {
        match self {
            CuspType::I => "I",
            CuspType::II => "II",
            CuspType::III => "III",
            CuspType::U => "u",
            CuspType::V => "v",
            CuspType::W => "w",
            CuspType::UN => "(u;n)",
            CuspType::VF => "(v;f)",
            CuspType::VF2 => "(v;f^2)",
            CuspType::VN => "(v;n)",
            CuspType::VN2 => "(v;n^2)",
        }
    }
}

/// `c_coeff·c + d_coeff·d = rhs` in lowest integral terms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LinearConstraint {
    pub c_coeff: i64,
    pub d_coeff: i64,
    pub rhs: i64,
}

impl std::fmt::Display for LinearConstraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}c + {}d = {}", self.c_coeff, self.d_coeff, self.rhs)
    }
}

fn primitive(c: &Rational, d: &Rational, rhs: &Rational) -> LinearConstraint {
    let l = c.denom().lcm(d.denom()).lcm(rhs.denom());
    let ints: Vec<i64> = [c, d, rhs]
        .iter()
        .map(|x| i64::try_from((*x * Rational::from(l.clone())).to_integer()).expect("small"))
        .collect();
    let g = ints.iter().fold(0i64, |g, x| g.gcd(x));
    let s = if ints[0] < 0 || (ints[0] == 0 && ints[1] < 0) { -g } else { g };
    LinearConstraint { c_coeff: ints[0] / s, d_coeff: ints[1] / s, rhs: ints[2] / s }
}

/// Builds the program, contracts everything but `sigma`, and returns
/// `(X·Σ, Y·Σ, -K·Σ)` on the contracted surface.
fn sigma_data(program: &str, sigma: &str, has_y: bool) -> Result<(Rational, Rational, Rational), ConfigError> {
    let p = parse_program(program)?;
    let cfg = p.configuration();
    let others: Vec<String> = cfg
        .curves
        .iter()
        .filter(|c| c.id != sigma && !matches!(c.origin, crate::config::Origin::Declared | crate::config::Origin::Plane))
        .map(|c| c.id.clone())
        .collect();
    let s = contract_to_surface(cfg, &ContractionPolicy::Explicit(others))?;
    let x = q_intersection(&s, "X", sigma)?;
    let y = if has_y { q_intersection(&s, "Y", sigma)? } else { Rational::zero() };
    Ok((x, y, -k_dot(&s, sigma)?))
}

fn node_program(g: u32, t: NodeType) -> (String, String) {
    let mut p = format!("surface local\ncurve X\ncurve Y\npoint q on X Y contact X:Y={g}\n");
    let sigma = match t {
        NodeType::Zero => {
            p += &format!("blowup q along X times {}\n", g - 1);
            format!("q{}", g - 1)
        }
        NodeType::I => {
            p += &format!("blowup q along X times {g}\n");
            format!("q{g}")
        }
        NodeType::II(r) => {
            p += &format!("blowup q along X times {g}\nblowup meet(X,q{g}) along X times {r} as s\n");
            if r == 1 {
                "s".to_string()
            } else {
                format!("s{r}")
            }
        }
    };
    (p, sigma)
}

/// The triviality constraint on `(c, d)` for a node of order `g`.
pub fn node_constraint(g: u32, t: NodeType) -> Result<LinearConstraint, ConfigError> {
    if g == 0 || (t == NodeType::Zero && g < 2) || matches!(t, NodeType::II(0)) {
        return Err(ConfigError::Unsupported(format!("node configuration {t:?} at order {g}")));
    }
    let (p, sigma) = node_program(g, t);
    let (x, y, k) = sigma_data(&p, &sigma, true)?;
    Ok(primitive(&x, &y, &k))
}

fn cusp_program(g: u32, t: CuspType) -> (String, &'static str) {
    let mut p = format!("surface local\ncurve X\npoint q on X~{g}\nblowup q along X times {g}\n");
    if t == CuspType::I {
        return (p, "");
    }
    p += &format!("blowup meet(X,q{g}) as t\n");
    if t == CuspType::II {
        return (p, "t");
    }
    p += "blowup meet(X,t) as s\n";
    let tail: &[(&str, &str)] = match t {
        CuspType::III => &[],
        CuspType::U => &[("meet(s,qG)", "U")],
        CuspType::V => &[("meet(s,X)", "V")],
        CuspType::W => &[("meet(s,t)", "W")],
        CuspType::UN => &[("meet(s,qG)", "U"), ("meet(U,s)", "N")],
        CuspType::VF => &[("meet(s,X)", "V"), ("meet(V,s)", "F1")],
        CuspType::VF2 => &[("meet(s,X)", "V"), ("meet(V,s)", "F1"), ("meet(F1,s)", "F2")],
        CuspType::VN => &[("meet(s,X)", "V"), ("meet(V,X)", "N1")],
        CuspType::VN2 => &[("meet(s,X)", "V"), ("meet(V,X)", "N1"), ("meet(N1,X)", "N2")],
        CuspType::I | CuspType::II => unreachable!(),
    };
    for (at, name) in tail {
        p += &format!("blowup {} as {name}\n", at.replace("qG", &format!("q{g}")));
    }
    (p, tail.last().map(|t| t.1).unwrap_or("s"))
}

/// The value of `c` for a cusp of order `g`.
pub fn cusp_constant(g: u32, t: CuspType) -> Result<Rational, ConfigError> {
    if g == 0 {
        return Err(ConfigError::Unsupported("cusp of order 0".into()));
    }
    let (p, sigma) = cusp_program(g, t);
    let sigma = if sigma.is_empty() { format!("q{g}") } else { sigma.to_string() };
    let (x, _, k) = sigma_data(&p, &sigma, false)?;
    if x.is_zero() || x.is_negative() {
        return Err(ConfigError::Unsupported(format!("X does not meet the contracted curve in {}", t.label())));
    }
    Ok(k / x)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContractionEntry {
    pub kind: String,
    pub configuration: String,
    pub g: u32,
    pub value: String,
}

/// Node constraints for `g ≤ max_g` (and `r ≤ max_g` at `g = 1`) and cusp
/// constants for the configurations listed at each order.
pub fn contraction_tables(max_g: u32) -> Result<Vec<ContractionEntry>, ConfigError> {
    let mut out = Vec::new();
    for g in 1..=max_g {
        let mut types = vec![NodeType::I, NodeType::II(1)];
        if g >= 2 {
            types.insert(0, NodeType::Zero);
        } else {
            types.extend((2..=max_g.max(2)).map(NodeType::II));
        }
        for t in types {
            let label = match t {
                NodeType::Zero => "0".to_string(),
                NodeType::I => "I".to_string(),
                NodeType::II(1) => "II".to_string(),
                NodeType::II(r) => format!("(II,x^{})", r - 1),
            };
            out.push(ContractionEntry {
                kind: "node".into(),
                configuration: label,
                g,
                value: node_constraint(g, t)?.to_string(),
            });
        }
    }
    for g in 1..=max_g {
        for t in CuspType::ALL {
            let listed = match t {
                CuspType::I | CuspType::II | CuspType::III => true,
                CuspType::U | CuspType::V => g <= 2,
                _ => g == 1,
            };
            if listed {
                out.push(ContractionEntry {
                    kind: "cusp".into(),
                    configuration: t.label().into(),
                    g,
                    value: fmt_q(&cusp_constant(g, t)?),
                });
            }
        }
    }
    Ok(out)
}
