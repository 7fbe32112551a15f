//! Boundary-edge switching data for an l-ball, the validity indicators, and
//! the measure-preserving involution T on (graph, switching-data) pairs.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::digraph::{ball, BallView, BoundaryEdge, Digraph};
use crate::error::{Error, Result};

/// Switching data for the radius-l neighborhood of a center vertex: one
/// sampled partner edge per boundary edge, labeled so that `c` is the vertex
/// that would attach to the inside endpoint, plus the validity flags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwitchingData {
    pub center: usize,
    pub ell: usize,
    /// Validity radius (the paper-scale choice is R/4; explicit here).
    pub r_chi: usize,
    pub boundary: Vec<BoundaryEdge>,
    /// (b, c) labels per boundary edge; for an outward boundary edge the
    /// partner edge is oriented b -> c, for an inward one c -> b.
    pub partners: Vec<(u32, u32)>,
    pub chi: Vec<bool>,
}

impl SwitchingData {
    pub fn mu(&self) -> usize {
        self.boundary.len()
    }

    pub fn valid_count(&self) -> usize {
        self.chi.iter().filter(|&&c| c).count()
    }

    pub fn zero_count(&self) -> usize {
        self.mu() - self.valid_count()
    }
}

/// The raw directed partner edge (tail, head) for index `alpha`, recovering
/// orientation from the boundary edge.
fn partner_raw(boundary: &BoundaryEdge, partner: (u32, u32)) -> (u32, u32) {
    if boundary.outward {
        partner
    } else {
        (partner.1, partner.0)
    }
}

/// Directed edges of `g` lying entirely outside the ball, deterministic order.
fn eligible_partner_edges(g: &Digraph, view: &BallView) -> Vec<(u32, u32)> {
    g.edges()
        .filter(|&(t, h)| !view.contains(t as usize) && !view.contains(h as usize))
        .collect()
}

/// Per-index complement-ball data used by the validity conditions.
struct TripleBall {
    /// distance from the triple within the complement, for vertices at
    /// distance <= r_chi
    dist: HashMap<u32, u32>,
    /// forest after adding the a-b edge
    tree_ok: bool,
}

fn triple_ball(g: &Digraph, view: &BallView, a: u32, b: u32, c: u32, r_chi: usize) -> TripleBall {
    let mut dist: HashMap<u32, u32> = HashMap::new();
    let mut comp: HashMap<u32, u32> = HashMap::new();
    let mut queue = std::collections::VecDeque::new();
    let mut sources: Vec<u32> = vec![a, b, c];
    sources.sort_unstable();
    sources.dedup();
    for (k, &s) in sources.iter().enumerate() {
        if view.contains(s as usize) {
            // triple touching the removed neighborhood never validates
            return TripleBall { dist, tree_ok: false };
        }
        dist.insert(s, 0);
        comp.insert(s, k as u32);
        queue.push_back(s);
    }
    // union-find over source components, merged as frontiers meet
    let mut parent: Vec<u32> = (0..sources.len() as u32).collect();
    fn find(parent: &mut Vec<u32>, mut x: u32) -> u32 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }
    while let Some(v) = queue.pop_front() {
        let dv = dist[&v];
        if (dv as usize) >= r_chi {
            continue;
        }
        for u in g.undirected_neighbors(v as usize) {
            if view.contains(u as usize) || dist.contains_key(&u) {
                continue;
            }
            dist.insert(u, dv + 1);
            let cv = comp[&v];
            comp.insert(u, cv);
            queue.push_back(u);
        }
    }
    // tally edges among ball vertices with multigraph multiplicity: each
    // directed edge contributes one undirected edge, so an antiparallel pair
    // already closes a cycle (the switch moves directed edges one at a time,
    // which is what keeps the indicator transport exact under T)
    let mut edge_count = 0usize;
    for (&v, _) in dist.iter() {
        for &h in g.out_neighbors(v as usize) {
            if dist.contains_key(&h) {
                edge_count += 1;
                let (rv, ru) = (find(&mut parent, comp[&v]), find(&mut parent, comp[&h]));
                if rv != ru {
                    parent[rv as usize] = ru;
                }
            }
        }
    }
    // distinct components among ball vertices
    let mut roots: Vec<u32> = dist
        .keys()
        .map(|v| find(&mut parent, comp[v]))
        .collect();
    roots.sort_unstable();
    roots.dedup();
    let components = roots.len();
    let forest = edge_count == dist.len() - components;
    // adding the a-b edge must not close a cycle: a, b in distinct components
    let tree_ok = forest
        && a != b
        && find(&mut parent, comp[&a]) != find(&mut parent, comp[&b]);
    TripleBall { dist, tree_ok }
}

fn compute_chi(
    g: &Digraph,
    view: &BallView,
    boundary: &[BoundaryEdge],
    partners: &[(u32, u32)],
    r_chi: usize,
) -> (Vec<bool>, Vec<TripleBall>) {
    let mu = boundary.len();
    let balls: Vec<TripleBall> = (0..mu)
        .map(|alpha| {
            let a = boundary[alpha].outside;
            let (b, c) = partners[alpha];
            triple_ball(g, view, a, b, c, r_chi)
        })
        .collect();
    let mut chi: Vec<bool> = balls.iter().map(|t| t.tree_ok).collect();
    // separation: triples must be at distance strictly greater than r_chi
    // from every other triple
    for alpha in 0..mu {
        for beta in (alpha + 1)..mu {
            let tb = [
                boundary[beta].outside,
                partners[beta].0,
                partners[beta].1,
            ];
            let close = tb.iter().any(|v| balls[alpha].dist.contains_key(v));
            if close {
                chi[alpha] = false;
                chi[beta] = false;
            }
        }
    }
    // final simplicity audit: a planned insert colliding with a surviving
    // edge of g or with another planned insert zeroes the index. The
    // separation and forest conditions already exclude this; kept as a
    // guard for exact simplicity at desk scale.
    loop {
        let mut removed: Vec<(u32, u32)> = Vec::new();
        let mut inserts: Vec<(u32, u32, usize)> = Vec::new();
        for alpha in 0..mu {
            if !chi[alpha] {
                continue;
            }
            let (l, a) = (boundary[alpha].inside, boundary[alpha].outside);
            let (b, c) = partners[alpha];
            if boundary[alpha].outward {
                removed.push((l, a));
                removed.push((b, c));
                inserts.push((l, c, alpha));
                inserts.push((b, a, alpha));
            } else {
                removed.push((a, l));
                removed.push((c, b));
                inserts.push((c, l, alpha));
                inserts.push((a, b, alpha));
            }
        }
        let mut offender = None;
        'scan: for (i, &(t, h, alpha)) in inserts.iter().enumerate() {
            if t == h {
                offender = Some(alpha);
                break;
            }
            if g.has_edge(t as usize, h as usize) && !removed.contains(&(t, h)) {
                offender = Some(alpha);
                break;
            }
            for &(t2, h2, alpha2) in &inserts[..i] {
                if t == t2 && h == h2 && alpha2 != alpha {
                    offender = Some(alpha);
                    break 'scan;
                }
            }
        }
        match offender {
            Some(alpha) => chi[alpha] = false,
            None => break,
        }
    }
    (chi, balls)
}

/// Assemble switching data from explicitly chosen partner edges (raw
/// (tail, head) directed edges of `g`, all strictly outside the ball).
pub fn switching_data_from_parts(
    g: &Digraph,
    center: usize,
    ell: usize,
    r_chi: usize,
    partner_edges: &[(u32, u32)],
) -> Result<SwitchingData> {
    let view = ball(g, &[center], ell)?;
    let boundary = view.boundary_edges.clone();
    if partner_edges.len() != boundary.len() {
        return Err(Error::InconsistentData(format!(
            "{} partner edges for {} boundary edges",
            partner_edges.len(),
            boundary.len()
        )));
    }
    let mut partners = Vec::with_capacity(boundary.len());
    for (alpha, &(t, h)) in partner_edges.iter().enumerate() {
        if view.contains(t as usize) || view.contains(h as usize) {
            return Err(Error::InconsistentData(format!(
                "partner edge ({t},{h}) touches the ball"
            )));
        }
        if !g.has_edge(t as usize, h as usize) {
            return Err(Error::InconsistentData(format!("({t},{h}) is not an edge")));
        }
        partners.push(if boundary[alpha].outward { (t, h) } else { (h, t) });
    }
    let (chi, _) = compute_chi(g, &view, &boundary, &partners, r_chi);
    Ok(SwitchingData { center, ell, r_chi, boundary, partners, chi })
}

/// Sample switching data: one partner edge per boundary edge, i.i.d. uniform
/// over the directed edges strictly outside the ball (repetition allowed).
pub fn sample_switching(
    g: &Digraph,
    center: usize,
    ell: usize,
    r_chi: usize,
    seed: u64,
) -> Result<SwitchingData> {
    if ell < 1 {
        return Err(Error::InvalidParameter("ell must be >= 1".into()));
    }
    let view = ball(g, &[center], ell)?;
    let eligible = eligible_partner_edges(g, &view);
    if eligible.is_empty() {
        return Err(Error::EmptyComplement);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<(u32, u32)> = (0..view.boundary_edges.len())
        .map(|_| eligible[rng.gen_range(0..eligible.len())])
        .collect();
    switching_data_from_parts(g, center, ell, r_chi, &raw)
}

/// Apply the switching involution T to (g, s), returning the switched graph
/// and the transported switching data.
fn same_boundary_multiset(a: &[BoundaryEdge], b: &[BoundaryEdge]) -> bool {
    let key = |e: &BoundaryEdge| (e.inside, e.outside, e.outward);
    let mut ka: Vec<_> = a.iter().map(key).collect();
    let mut kb: Vec<_> = b.iter().map(key).collect();
    ka.sort_unstable();
    kb.sort_unstable();
    ka == kb
}

pub fn apply_switch(g: &Digraph, s: &SwitchingData) -> Result<(Digraph, SwitchingData)> {
    let view = ball(g, &[s.center], s.ell)?;
    // the data's own boundary ordering is authoritative (a switch permutes
    // the in-edge enumeration); the graph must agree as a multiset
    if !same_boundary_multiset(&view.boundary_edges, &s.boundary) {
        return Err(Error::InconsistentData("boundary does not match the graph".into()));
    }
    if s.partners.len() != s.boundary.len() || s.chi.len() != s.boundary.len() {
        return Err(Error::InconsistentData("field lengths disagree".into()));
    }
    for (alpha, &(b, c)) in s.partners.iter().enumerate() {
        let (t, h) = partner_raw(&s.boundary[alpha], (b, c));
        if view.contains(t as usize) || view.contains(h as usize) {
            return Err(Error::InconsistentData(format!(
                "partner edge ({t},{h}) touches the ball"
            )));
        }
        if !g.has_edge(t as usize, h as usize) {
            return Err(Error::InconsistentData(format!("({t},{h}) is not an edge")));
        }
    }
    let (chi, _) = compute_chi(g, &view, &s.boundary, &s.partners, s.r_chi);
    if chi != s.chi {
        return Err(Error::InconsistentData("validity flags do not match the graph".into()));
    }

    // slot replacements: delete (l,a) & (b,c), insert (l,c) & (b,a), with
    // orientations carried over; heads are replaced in place so the ball's
    // boundary enumeration order is preserved
    let slot_of = |tail: u32, head: u32| -> usize {
        g.out_neighbors(tail as usize)
            .iter()
            .position(|&x| x == head)
            .expect("validated edge")
    };
    let mut replacements: Vec<(usize, usize, u32)> = Vec::new();
    for alpha in 0..s.mu() {
        if !s.chi[alpha] {
            continue;
        }
        let (l, a) = (s.boundary[alpha].inside, s.boundary[alpha].outside);
        let (b, c) = s.partners[alpha];
        if s.boundary[alpha].outward {
            replacements.push((l as usize, slot_of(l, a), c));
            replacements.push((b as usize, slot_of(b, c), a));
        } else {
            replacements.push((a as usize, slot_of(a, l), b));
            replacements.push((c as usize, slot_of(c, b), l));
        }
    }
    let switched = g.with_replaced_heads(&replacements)?;
    if !switched.is_simple() {
        return Err(Error::InconsistentData(
            "switch produced a non-simple graph; validity flags were wrong".into(),
        ));
    }

    let boundary2: Vec<BoundaryEdge> = s
        .boundary
        .iter()
        .enumerate()
        .map(|(alpha, e)| {
            if s.chi[alpha] {
                BoundaryEdge { inside: e.inside, outside: s.partners[alpha].1, outward: e.outward }
            } else {
                *e
            }
        })
        .collect();
    let partners2: Vec<(u32, u32)> = (0..s.mu())
        .map(|alpha| {
            if s.chi[alpha] {
                (s.partners[alpha].0, s.boundary[alpha].outside)
            } else {
                s.partners[alpha]
            }
        })
        .collect();
    let view2 = ball(&switched, &[s.center], s.ell)?;
    if !same_boundary_multiset(&view2.boundary_edges, &boundary2) {
        return Err(Error::InconsistentData("switched boundary drifted".into()));
    }
    let (chi2, _) = compute_chi(&switched, &view2, &boundary2, &partners2, s.r_chi);
    Ok((
        switched,
        SwitchingData {
            center: s.center,
            ell: s.ell,
            r_chi: s.r_chi,
            boundary: boundary2,
            partners: partners2,
            chi: chi2,
        },
    ))
}

/// Monte Carlo summary of switching behavior around one center.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SwitchStatistics {
    pub trials: usize,
    pub mu: usize,
    pub zero_chi_mean: f64,
    pub zero_chi_max: usize,
    pub valid_mean: f64,
    pub simplicity_violations: usize,
    /// max over trials and vertices outside the ball of the number of
    /// triples within distance r_chi of the vertex
    pub max_proximity_count: usize,
    pub nontree_fraction_mean: f64,
    pub nontree_fraction_max: f64,
}

/// Repeated switching trials with per-trial RNG streams split from the seed.
pub fn switch_statistics(
    g: &Digraph,
    center: usize,
    ell: usize,
    r_chi: usize,
    trials: usize,
    seed: u64,
) -> Result<SwitchStatistics> {
    let mut zero_counts = Vec::with_capacity(trials);
    let mut valid_counts = Vec::with_capacity(trials);
    let mut simplicity_violations = 0usize;
    let mut max_proximity = 0usize;
    let mut nontree = Vec::with_capacity(trials);
    let mut mu = 0usize;
    let view = ball(g, &[center], ell)?;
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t as u64 + 1);
        let eligible = eligible_partner_edges(g, &view);
        if eligible.is_empty() {
            return Err(Error::EmptyComplement);
        }
        let raw: Vec<(u32, u32)> = (0..view.boundary_edges.len())
            .map(|_| eligible[rng.gen_range(0..eligible.len())])
            .collect();
        let s = switching_data_from_parts(g, center, ell, r_chi, &raw)?;
        mu = s.mu();
        zero_counts.push(s.zero_count());
        valid_counts.push(s.valid_count());
        // proximity census from the triple balls
        let (_, balls) = compute_chi(g, &view, &s.boundary, &s.partners, r_chi);
        let mut counts: HashMap<u32, usize> = HashMap::new();
        for tb in &balls {
            for &v in tb.dist.keys() {
                *counts.entry(v).or_insert(0) += 1;
            }
        }
        if let Some(&m) = counts.values().max() {
            max_proximity = max_proximity.max(m);
        }
        match apply_switch(g, &s) {
            Ok((g2, _)) => {
                if !g2.is_simple() {
                    simplicity_violations += 1;
                }
                let n = g2.n_vertices();
                let bad = (0..n)
                    .filter(|&v| {
                        let b = ball(&g2, &[v], ell).unwrap();
                        !crate::digraph::neighborhood_stats(&b).is_tree
                    })
                    .count();
                nontree.push(bad as f64 / n as f64);
            }
            Err(_) => simplicity_violations += 1,
        }
    }
    let mean = |xs: &[usize]| xs.iter().sum::<usize>() as f64 / xs.len().max(1) as f64;
    Ok(SwitchStatistics {
        trials,
        mu,
        zero_chi_mean: mean(&zero_counts),
        zero_chi_max: zero_counts.iter().copied().max().unwrap_or(0),
        valid_mean: mean(&valid_counts),
        simplicity_violations,
        max_proximity_count: max_proximity,
        nontree_fraction_mean: nontree.iter().sum::<f64>() / nontree.len().max(1) as f64,
        nontree_fraction_max: nontree.iter().copied().fold(0.0, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::{neighborhood_stats, sample_simple};

    #[test]
    fn empty_complement_on_small_graph() {
        let g = sample_simple(4, 3, 11, 100_000).unwrap();
        assert!(matches!(
            sample_switching(&g, 0, 1, 1, 5),
            Err(Error::EmptyComplement)
        ));
    }

    #[test]
    fn tree_ball_mu_and_orientation_split() {
        let g = sample_simple(2000, 3, 21, 100_000).unwrap();
        for center in [5usize, 123, 999] {
            let view = ball(&g, &[center], 2).unwrap();
            if !neighborhood_stats(&view).is_tree {
                continue;
            }
            let s = sample_switching(&g, center, 2, 2, 9).unwrap();
            assert_eq!(s.mu(), 6 * 5 * 5);
            let outward = s.boundary.iter().filter(|e| e.outward).count();
            assert_eq!(outward * 2, s.mu());
        }
    }

    #[test]
    fn all_invalid_is_identity() {
        let g = sample_simple(300, 3, 3, 100_000).unwrap();
        let mut s = sample_switching(&g, 0, 1, 2, 17).unwrap();
        // graph unchanged when every flag is off; flags must be recomputable
        for v in s.chi.iter_mut() {
            *v = false;
        }
        // chi no longer matches -> inconsistent
        let err = apply_switch(&g, &s);
        if s.valid_count() == 0 {
            // already all-zero: identity
            let (g2, s2) = err.unwrap();
            assert_eq!(g2, g);
            assert_eq!(s2, s);
        } else {
            assert!(matches!(err, Err(Error::InconsistentData(_))));
        }
    }

    #[test]
    fn involution_and_regularity_small() {
        let n = 1500;
        let mut switches_seen = 0usize;
        for seed in 0..15u64 {
            let g = sample_simple(n, 3, seed, 100_000).unwrap();
            let center = (seed as usize * 13) % n;
            let s = match sample_switching(&g, center, 1, 1, seed ^ 0x5eed) {
                Ok(s) => s,
                Err(Error::EmptyComplement) => continue,
                Err(e) => panic!("{e}"),
            };
            let (g2, s2) = apply_switch(&g, &s).unwrap();
            switches_seen += s.valid_count();
            assert!(g2.is_simple());
            // degree audit
            for v in 0..n {
                assert_eq!(g2.out_neighbors(v).len(), 3);
                assert_eq!(g2.in_neighbors(v).len(), 3);
            }
            let (g3, s3) = apply_switch(&g2, &s2).unwrap();
            assert_eq!(g3, g, "involution failed on graph, seed {seed}");
            assert_eq!(s3, s, "involution failed on data, seed {seed}");
        }
        assert!(switches_seen > 20, "only {switches_seen} switches exercised");
    }

    #[test]
    fn chi_transport_under_involution() {
        // valid flags must be identical after one application
        for seed in 100..120u64 {
            let g = sample_simple(600, 3, seed, 100_000).unwrap();
            let s = match sample_switching(&g, 7, 1, 2, seed) {
                Ok(s) => s,
                Err(_) => continue,
            };
            let (_, s2) = apply_switch(&g, &s).unwrap();
            assert_eq!(s.chi, s2.chi);
        }
    }

    #[test]
    fn exhaustive_injectivity_on_cycle() {
        // d = 1 keeps the enumeration tiny: an 8-cycle, ball radius 1 around
        // vertex 0 has boundary {(1,2,out),(7,6,in)} and four eligible
        // partner edges; check T is injective over all 16 data choices
        let out_edges: Vec<Vec<u32>> = (0..8u32).map(|v| vec![(v + 1) % 8]).collect();
        let g = Digraph::from_out_edges(8, 1, out_edges).unwrap();
        let view = ball(&g, &[0], 1).unwrap();
        let eligible = eligible_partner_edges(&g, &view);
        assert_eq!(view.boundary_edges.len(), 2);
        assert_eq!(eligible.len(), 4);
        let mut images = Vec::new();
        for &e1 in &eligible {
            for &e2 in &eligible {
                let s = switching_data_from_parts(&g, 0, 1, 1, &[e1, e2]).unwrap();
                let (g2, s2) = apply_switch(&g, &s).unwrap();
                let (g3, s3) = apply_switch(&g2, &s2).unwrap();
                assert_eq!(g3, g);
                assert_eq!(s3, s);
                images.push((serde_json::to_string(&g2).unwrap(), serde_json::to_string(&s2).unwrap()));
            }
        }
        let total = images.len();
        images.sort();
        images.dedup();
        assert_eq!(images.len(), total, "T is not injective on the enumeration");
    }

    #[test]
    fn switch_statistics_zero_trials() {
        let g = sample_simple(200, 3, 2, 100_000).unwrap();
        let st = switch_statistics(&g, 0, 1, 1, 0, 7).unwrap();
        assert_eq!(st.trials, 0);
        assert_eq!(st.simplicity_violations, 0);
        assert_eq!(st.zero_chi_max, 0);
    }

    #[test]
    fn switch_statistics_desk_scale() {
        let g = sample_simple(2000, 3, 31, 100_000).unwrap();
        let st = switch_statistics(&g, 11, 2, 4, 8, 99).unwrap();
        assert_eq!(st.simplicity_violations, 0);
        // at desk scale the strict R/4-separation zeroes most indices; the
        // count is stable near mu
        assert!(st.zero_chi_mean <= st.mu as f64);
        assert!(st.zero_chi_mean >= 0.5 * st.mu as f64);
        assert!(st.max_proximity_count >= 1);
    }

    #[test]
    fn switching_data_roundtrips_json() {
        let g = sample_simple(500, 3, 77, 100_000).unwrap();
        let s = sample_switching(&g, 3, 1, 2, 123).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        let s2: SwitchingData = serde_json::from_str(&text).unwrap();
        assert_eq!(s, s2);
    }
}


