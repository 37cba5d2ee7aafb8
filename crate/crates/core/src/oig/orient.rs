use serde::{Deserialize, Serialize};

use super::graph::{full_cube, build_one_inclusion_graph, OneInclusionGraph};
use crate::error::{Error, Result};
use crate::flow::FlowNetwork;

/// Edge-mass feasibility tolerance.
pub const ORIENTATION_TOLERANCE: f64 = 1e-9;

/// Per-edge split `(x_{zero->one}, x_{one->zero})`; the mass on `a -> b`
/// counts toward `a`'s out-degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionalOrientation {
    pub masses: Vec<(f64, f64)>,
    pub out_degree: Vec<f64>,
    pub value: f64,
}

impl FractionalOrientation {
    fn from_masses(g: &OneInclusionGraph, masses: Vec<(f64, f64)>) -> Self {
        let mut out = vec![0.0; g.vertex_count()];
        for (e, &(a, b)) in g.edges.iter().zip(&masses) {
            out[e.zero] += a;
            out[e.one] += b;
        }
        let value = out.iter().copied().fold(0.0, f64::max);
        Self { masses, out_degree: out, value }
    }

    /// Masses sum to one per edge and no vertex exceeds `value`.
    pub fn is_valid(&self, g: &OneInclusionGraph) -> bool {
        self.masses.len() == g.edges.len()
            && self.masses.iter().all(|&(a, b)| a >= 0.0 && b >= 0.0 && (a + b - 1.0).abs() <= ORIENTATION_TOLERANCE)
            && self.out_degree.iter().all(|&o| o <= self.value + ORIENTATION_TOLERANCE)
    }
}

fn edges_inside(g: &OneInclusionGraph, keep: &[bool]) -> usize {
    g.edges.iter().filter(|e| keep[e.zero] && keep[e.one]).count()
}

struct Parametric {
    net: FlowNetwork,
    to_zero: Vec<usize>,
    to_one: Vec<usize>,
    flow: f64,
}

// source -> edge (1), edge -> endpoints (1), vertex -> sink (lambda).
fn parametric_flow(g: &OneInclusionGraph, lambda: f64) -> Parametric {
    let (ne, nv) = (g.edges.len(), g.vertex_count());
    let (s, t) = (0, 1 + ne + nv);
    let mut net = FlowNetwork::new(t + 1);
    let mut to_zero = Vec::with_capacity(ne);
    let mut to_one = Vec::with_capacity(ne);
    for (i, e) in g.edges.iter().enumerate() {
        net.add_arc(s, 1 + i, 1.0);
        to_zero.push(net.add_arc(1 + i, 1 + ne + e.zero, 1.0));
        to_one.push(net.add_arc(1 + i, 1 + ne + e.one, 1.0));
    }
    for v in 0..nv {
        net.add_arc(1 + ne + v, t, lambda);
    }
    let flow = net.max_flow(s, t);
    Parametric { net, to_zero, to_one, flow }
}

// Dinkelbach iteration: lambda is always the density of some vertex set, and
// a flow saturating every edge at capacity lambda proves it maximal.
fn solve(g: &OneInclusionGraph) -> Result<(f64, Parametric)> {
    let (ne, nv) = (g.edges.len(), g.vertex_count());
    let mut lambda = ne as f64 / nv as f64;
    for _ in 0..=nv + 2 {
        let p = parametric_flow(g, lambda);
        if p.flow >= ne as f64 - ORIENTATION_TOLERANCE {
            return Ok((lambda, p));
        }
        let side = p.net.source_side(0);
        let keep: Vec<bool> = (0..nv).map(|v| side[1 + ne + v]).collect();
        let k = keep.iter().filter(|&&b| b).count();
        if k == 0 {
            return Err(Error::Solver("empty cut while flow is unsaturated".into()));
        }
        let next = edges_inside(g, &keep) as f64 / k as f64;
        if next <= lambda + 1e-12 {
            return Err(Error::Solver(format!("density did not increase past {lambda}")));
        }
        lambda = next;
    }
    Err(Error::Solver("iteration limit".into()))
}

/// Minimize the maximum fractional out-degree.
pub fn min_max_fractional_orientation(g: &OneInclusionGraph) -> Result<FractionalOrientation> {
    if g.edges.is_empty() {
        return Ok(FractionalOrientation { masses: vec![], out_degree: vec![0.0; g.vertex_count()], value: 0.0 });
    }
    let (lambda, p) = solve(g)?;
    let masses = (0..g.edges.len())
        .map(|i| {
            let (a, b) = (p.net.flow(p.to_zero[i]).max(0.0), p.net.flow(p.to_one[i]).max(0.0));
            let s = a + b;
            if s <= 0.0 {
                (0.5, 0.5)
            } else {
                (a / s, 1.0 - a / s)
            }
        })
        .collect();
    let mut o = FractionalOrientation::from_masses(g, masses);
    if o.value > lambda + ORIENTATION_TOLERANCE {
        return Err(Error::Solver(format!("out-degree {} exceeds optimum {lambda}", o.value)));
    }
    o.value = lambda;
    Ok(o)
}

/// `max |E(H)| / |V(H)|` over nonempty vertex sets.
pub fn densest_subgraph_density(g: &OneInclusionGraph) -> Result<f64> {
    if g.vertex_count() <= 20 {
        Ok(densest_subgraph_exhaustive(g))
    } else {
        densest_subgraph_flow(g)
    }
}

/// Scan of all `2^|V| - 1` vertex sets.
pub fn densest_subgraph_exhaustive(g: &OneInclusionGraph) -> f64 {
    let nv = g.vertex_count();
    assert!(nv <= 24, "exhaustive scan limited to 24 vertices");
    let mut adj = vec![0u32; nv];
    for e in &g.edges {
        adj[e.zero] |= 1 << e.one;
        adj[e.one] |= 1 << e.zero;
    }
    let mut best: f64 = 0.0;
    for mask in 1u32..(1u32 << nv) {
        let mut twice = 0;
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            twice += (adj[v] & mask).count_ones();
            rest &= rest - 1;
        }
        best = best.max(f64::from(twice / 2) / f64::from(mask.count_ones()));
    }
    best
}

/// Parametric min-cut density.
pub fn densest_subgraph_flow(g: &OneInclusionGraph) -> Result<f64> {
    if g.edges.is_empty() {
        return Ok(0.0);
    }
    solve(g).map(|(l, _)| l)
}

/// The parity rule on a full cube: the edge on coordinate `i` (1-indexed)
/// points at the endpoint whose number of ones is congruent to `i` mod 2.
pub fn parity_orient(g: &OneInclusionGraph) -> Result<FractionalOrientation> {
    let d = g.vertices.first().map_or(0, Vec::len);
    g.full_cube_dimension().ok_or(Error::NotFullCube(d))?;
    let parity = |v: usize| g.vertices[v].iter().filter(|&&b| b).count() % 2;
    let masses = g
        .edges
        .iter()
        .map(|e| if parity(e.one) == (e.coord + 1) % 2 { (1.0, 0.0) } else { (0.0, 1.0) })
        .collect();
    Ok(FractionalOrientation::from_masses(g, masses))
}

/// Parity orientation of `{0,1}^n`.
pub fn parity_orientation(n: usize) -> Result<(OneInclusionGraph, FractionalOrientation)> {
    if n > 20 {
        return Err(Error::CapExceeded(format!("cube dimension {n}")));
    }
    let g = build_one_inclusion_graph(&full_cube(n));
    let o = parity_orient(&g)?;
    Ok((g, o))
}

/// Maximum out-degree of every integral orientation (edge `i` toward `one`
/// iff bit `i` of the index is set). Refuses more than `cap` orientations.
pub fn integral_orientation_values(g: &OneInclusionGraph, cap: usize) -> Result<Vec<usize>> {
    let ne = g.edges.len();
    if ne >= 63 || (1usize << ne) > cap {
        return Err(Error::CapExceeded(format!("2^{ne} integral orientations")));
    }
    let mut out = Vec::with_capacity(1 << ne);
    let mut deg = vec![0usize; g.vertex_count()];
    for code in 0..1usize << ne {
        deg.iter_mut().for_each(|d| *d = 0);
        for (i, e) in g.edges.iter().enumerate() {
            if code >> i & 1 == 1 {
                deg[e.zero] += 1
            } else {
                deg[e.one] += 1
            }
        }
        out.push(deg.iter().copied().max().unwrap_or(0));
    }
    Ok(out)
}
