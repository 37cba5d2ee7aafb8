use microlp::{ComparisonOp, OptimizationDirection, Problem};

use super::lp_solve;
use crate::domain::DomainPoint;
use crate::error::{Error, Result};
use crate::hypothesis::{collapse, HypothesisClass};

pub const TRANSDUCTIVE_VERTEX_CAP: usize = 16;

/// Minimum over fractional orientations of the maximum out-degree, over `|S|`.
/// Built from a pairwise edge scan and one LP.
pub fn best_transductive_value(class: &dyn HypothesisClass, s: &[DomainPoint]) -> Result<f64> {
    if s.is_empty() {
        return Ok(0.0);
    }
    let (points, mult) = collapse(s);
    let vertices = match class.project(&points, TRANSDUCTIVE_VERTEX_CAP) {
        Err(Error::ProjectionTooLarge { cap }) => {
            return Err(Error::CapExceeded(format!("more than {cap} behaviors")));
        }
        r => r?,
    };
    let mut edges = Vec::new();
    for a in 0..vertices.len() {
        for b in a + 1..vertices.len() {
            let diff: Vec<usize> = (0..points.len()).filter(|&i| vertices[a][i] != vertices[b][i]).collect();
            if diff.len() == 1 && mult[diff[0]] == 1 {
                edges.push((a, b));
            }
        }
    }
    let mut p = Problem::new(OptimizationDirection::Minimize);
    // x_e: mass of edge e leaving its first endpoint.
    let x: Vec<_> = edges.iter().map(|_| p.add_var(0.0, (0.0, 1.0))).collect();
    let t = p.add_var(1.0, (0.0, f64::INFINITY));
    for v in 0..vertices.len() {
        let mut expr = vec![(t, -1.0)];
        let mut rhs = 0.0;
        for (e, &(a, b)) in edges.iter().enumerate() {
            if a == v {
                expr.push((x[e], 1.0));
            } else if b == v {
                expr.push((x[e], -1.0));
                rhs -= 1.0;
            }
        }
        p.add_constraint(expr, ComparisonOp::Le, rhs);
    }
    Ok(lp_solve(&p)?.objective() / s.len() as f64)
}
