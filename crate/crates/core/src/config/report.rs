//! JSON-ready summaries of a contracted surface.

use serde::Serialize;

use super::surface::{branch_index, germs_of, k_dot, k_squared, q_self, SurfaceModel};
use super::ConfigError;
use crate::fmt_q;
use crate::singularity::SingularityGraph;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SingularityReport {
    pub graph: String,
    pub weights: Vec<i64>,
    pub curves: Vec<String>,
    /// Kept curves meeting each vertex, as `curve@vertex`.
    pub markings: Vec<String>,
    pub index: u64,
    pub cartier_index: u64,
    pub discrepancies: Vec<String>,
    pub coefficient: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GermReport {
    pub id: String,
    pub point: Option<usize>,
    pub incidences: Vec<(String, i64)>,
    pub branch_index: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CurveReport {
    pub id: String,
    pub smooth_self_int: Option<i64>,
    pub smooth_k_deg: Option<i64>,
    /// `K_S·C`.
    pub k_deg: Option<String>,
    /// `C^2` on `S`.
    pub self_int: Option<String>,
    pub germs: Vec<GermReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SurfaceReport {
    pub singularities: Vec<SingularityReport>,
    pub k_squared: Option<String>,
    pub curves: Vec<CurveReport>,
}

pub fn surface_report(s: &SurfaceModel) -> Result<SurfaceReport, ConfigError> {
    let singularities = s
        .singularities
        .iter()
        .map(|sp| SingularityReport {
            graph: match &sp.graph {
                SingularityGraph::Chain(c) => format!("({})", c.weights().iter().map(u32::to_string).collect::<Vec<_>>().join(",")),
                other => other.to_string(),
            },
            weights: sp.tree.weights.clone(),
            curves: sp.curves.clone(),
            markings: sp.adjacency.iter().map(|(c, v, _)| format!("{c}@{v}")).collect(),
            index: sp.index(),
            cartier_index: sp.cartier_index(),
            discrepancies: sp.discrepancies.iter().map(fmt_q).collect(),
            coefficient: fmt_q(&sp.coefficient()),
        })
        .collect();
    let mut curves = Vec::new();
    for id in s.kept_curves() {
        let c = s.config.curve(&id)?;
        let global = !c.local;
        let germs = germs_of(s, &id)?
            .into_iter()
            .map(|g| Ok(GermReport { branch_index: branch_index(s, &g)?, id: g.id, point: g.point, incidences: g.incidences }))
            .collect::<Result<Vec<_>, ConfigError>>()?;
        curves.push(CurveReport {
            smooth_self_int: global.then_some(c.self_int),
            smooth_k_deg: global.then_some(c.k_deg),
            k_deg: if global { Some(fmt_q(&k_dot(s, &id)?)) } else { None },
            self_int: if global { Some(fmt_q(&q_self(s, &id)?)) } else { None },
            germs,
            id,
        });
    }
    let k_squared = k_squared(s).ok().map(|k| fmt_q(&k));
    Ok(SurfaceReport { singularities, k_squared, curves })
}
