//! Surfaces built from matching data.
//!
//! The graph has one vertex per interval endpoint and three edge families:
//! intervals, connectors (around `w` and through the junction maps) and
//! arcs (from `sigma` and `tau`). Gluing a disc to every alternating
//! connector/arc cycle (type I) and every interval/arc cycle (type II)
//! gives a surface whose boundary is traced by intervals and connectors.
//! For starred data every type-II disc is a rectangle, and collapsing each
//! rectangle to a single arc gives the collapsed surface used by the
//! Euler characteristic bound.

use rayon::prelude::*;
use serde::Serialize;

use crate::dsu::RollbackDsu;
use crate::error::{Error, Result};
use crate::matchenum::{
    datum_consistent, enumerate_match, layout_for, IntervalKind, Layout, MatchOptions,
    MatchingDatum,
};
use crate::symgroup::count_cycles;
use crate::words::{surface_relator, Letter, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EdgeKind {
    WInterval,
    RInterval,
    RInvInterval,
    WConnector,
    PiConnector,
    SigmaArc,
    TauArc,
}

impl EdgeKind {
    fn is_interval(self) -> bool {
        matches!(
            self,
            EdgeKind::WInterval | EdgeKind::RInterval | EdgeKind::RInvInterval
        )
    }

    fn is_arc(self) -> bool {
        matches!(self, EdgeKind::SigmaArc | EdgeKind::TauArc)
    }
}

/// An edge directed from `ends[0]` to `ends[1]`; intervals run from their
/// 0-end to their 1-end, arcs from the positive to the negative block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub kind: EdgeKind,
    pub ends: [usize; 2],
    /// Generator label, absent on connectors.
    pub gen: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DiscKind {
    TypeI,
    TypeII,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Disc {
    pub kind: DiscKind,
    /// Boundary edges in cyclic order.
    pub edges: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LoopKind {
    W,
    R,
    RInv,
    /// Relator letters of both kinds, possible only off the starred subset.
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryLoop {
    pub kind: LoopKind,
    /// Letters read along the loop, compact spelling.
    pub word: String,
    /// Interval ids in reading order.
    pub intervals: Vec<usize>,
    /// `p` when the loop reads a rotation of `R^p` (negative for `R^-1`).
    pub power: Option<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecoratedSurface {
    pub g: usize,
    pub k: usize,
    pub l: usize,
    pub word: String,
    pub star: bool,
    pub num_vertices: usize,
    pub edges: Vec<Edge>,
    pub discs: Vec<Disc>,
    pub boundary_loops: Vec<BoundaryLoop>,
    pub chi_graph: i64,
    pub chi: i64,
    pub type_i: usize,
    pub type_ii: usize,
    /// Genus of each connected component.
    pub genera: Vec<usize>,
    #[serde(skip)]
    layout: Layout,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ArcClass {
    WW,
    WR,
    RR,
}

/// A collapsed rectangle, directed from its positive to its negative interval.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CollapsedArc {
    pub gen: usize,
    pub from: usize,
    pub to: usize,
    pub class: ArcClass,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CollapsedDisc {
    /// Connector edges of the decorated surface: boundary segments.
    pub segments: Vec<usize>,
    /// Segments lying on the w-loop.
    pub w_segments: usize,
    /// Collapsed arc met by each arc-side, one entry per side.
    pub arc_sides: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CollapsedSurface {
    pub g: usize,
    pub k: usize,
    pub l: usize,
    pub word_len: usize,
    pub arcs: Vec<CollapsedArc>,
    pub discs: Vec<CollapsedDisc>,
    pub boundary_loops: Vec<BoundaryLoop>,
    pub chi: i64,
    pub n_ww: usize,
    pub n_wr: usize,
    pub n_rr: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Piece {
    pub discs: Vec<usize>,
    pub wr_arcs: Vec<usize>,
    /// Number of WR-arcs.
    pub e_count: usize,
    /// Number of RR-arc-sides meeting the piece.
    pub he_count: usize,
    pub chi: i64,
}

impl Piece {
    /// `e <= (2g-1) he + 2g chi`.
    pub fn satisfies_inequality(&self, g: usize) -> bool {
        let g = g as i64;
        self.e_count as i64 <= (2 * g - 1) * self.he_count as i64 + 2 * g * self.chi
    }
}

fn violation(what: &str, dump: &impl Serialize) -> Error {
    let body = serde_json::to_string(dump).unwrap_or_else(|e| format!("<dump failed: {e}>"));
    Error::Violation(format!("{what}: {body}"))
}

fn is_rotation(a: &[Letter], b: &[Letter]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    let doubled: Vec<Letter> = a.iter().chain(a).copied().collect();
    doubled.windows(b.len()).any(|win| win == b)
}

fn relator_power(read: &[Letter], rel: &[Letter]) -> Option<i64> {
    let rl = rel.len();
    if read.is_empty() || !read.len().is_multiple_of(rl) {
        return None;
    }
    let p = read.len() / rl;
    let pos: Vec<Letter> = rel.iter().cycle().take(p * rl).copied().collect();
    if is_rotation(&pos, read) {
        return Some(p as i64);
    }
    let inv: Vec<Letter> = rel.iter().rev().map(|l| l.inverse()).collect();
    let neg: Vec<Letter> = inv.iter().cycle().take(p * rl).copied().collect();
    if is_rotation(&neg, read) {
        return Some(-(p as i64));
    }
    None
}

/// Follows a cycle alternating between two perfect matchings of the
/// endpoints, starting with `first` at `start`.
fn trace(
    start: usize,
    first: &[usize],
    second: &[usize],
    edges: &[Edge],
    seen: &mut [bool],
) -> Vec<usize> {
    let other = |e: usize, v: usize| {
        let [a, b] = edges[e].ends;
        if a == v {
            b
        } else {
            a
        }
    };
    let mut out = Vec::new();
    let mut v = start;
    loop {
        let e = first[v];
        seen[e] = true;
        out.push(e);
        v = other(e, v);
        let e2 = second[v];
        seen[e2] = true;
        out.push(e2);
        v = other(e2, v);
        if v == start {
            return out;
        }
    }
}

/// Builds the decorated surface of one datum.
pub fn build_surface(d: &MatchingDatum, w: &Word) -> Result<DecoratedSurface> {
    let opts = MatchOptions {
        general_genus: true,
        ..Default::default()
    };
    let layout = layout_for(w, d.k, d.l, &opts)?;
    build_on(&layout, d)
}

fn build_on(layout: &Layout, d: &MatchingDatum) -> Result<DecoratedSurface> {
    datum_consistent(layout, d)?;
    let nv = layout.num_endpoints();
    let mut edges: Vec<Edge> = layout
        .intervals
        .iter()
        .enumerate()
        .map(|(i, iv)| Edge {
            kind: match iv.kind {
                IntervalKind::W => EdgeKind::WInterval,
                IntervalKind::R => EdgeKind::RInterval,
                IntervalKind::RInv => EdgeKind::RInvInterval,
            },
            ends: [2 * i, 2 * i + 1],
            gen: Some(iv.gen),
        })
        .collect();
    for &(a, b) in &layout.w_connectors {
        edges.push(Edge {
            kind: EdgeKind::WConnector,
            ends: [a, b],
            gen: None,
        });
    }
    for (i, p) in d.pis.iter().enumerate() {
        for (a, b) in layout.pi_connectors(i, p.images()) {
            edges.push(Edge {
                kind: EdgeKind::PiConnector,
                ends: [a, b],
                gen: None,
            });
        }
    }
    for f in 0..d.sigma.len() {
        for (a, b) in layout.sigma_arcs(f, d.sigma[f].images()) {
            edges.push(Edge {
                kind: EdgeKind::SigmaArc,
                ends: [a, b],
                gen: Some(f),
            });
        }
        for (a, b) in layout.tau_arcs(f, d.tau[f].images()) {
            edges.push(Edge {
                kind: EdgeKind::TauArc,
                ends: [a, b],
                gen: Some(f),
            });
        }
    }

    // Every endpoint meets exactly one edge of each family.
    const NONE: usize = usize::MAX;
    let mut by_family = [vec![NONE; nv], vec![NONE; nv], vec![NONE; nv]];
    for (id, e) in edges.iter().enumerate() {
        let fam = if e.kind.is_interval() {
            0
        } else if e.kind.is_arc() {
            2
        } else {
            1
        };
        for &v in &e.ends {
            if by_family[fam][v] != NONE {
                return Err(violation("endpoint is not trivalent", &(v, e)));
            }
            by_family[fam][v] = id;
        }
        // Orientability: every edge joins a 0-end to a 1-end.
        if e.ends[0] % 2 == e.ends[1] % 2 {
            return Err(violation("edge joins endpoints of equal parity", e));
        }
    }
    if by_family.iter().any(|f| f.contains(&NONE)) {
        return Err(Error::Violation("endpoint is not trivalent".into()));
    }
    let [ivs, conns, arcs] = &by_family;

    let mut discs = Vec::new();
    let mut seen = vec![false; edges.len()];
    for v in 0..nv {
        if !seen[conns[v]] {
            discs.push(Disc {
                kind: DiscKind::TypeI,
                edges: trace(v, conns, arcs, &edges, &mut seen),
            });
        }
    }
    let type_i = discs.len();
    for v in 0..nv {
        if !seen[ivs[v]] {
            discs.push(Disc {
                kind: DiscKind::TypeII,
                edges: trace(v, ivs, arcs, &edges, &mut seen),
            });
        }
    }
    let type_ii = discs.len() - type_i;
    let expected_ii: usize = d
        .sigma
        .iter()
        .zip(&d.tau)
        .map(|(s, t)| count_cycles(s.compose(&t.inverse()).images()))
        .sum();
    if type_ii != expected_ii {
        return Err(violation(
            "type-II discs differ from the Weingarten cycle count",
            &(type_ii, expected_ii),
        ));
    }

    let rel = surface_relator(layout.g);
    let rl = rel.letters();
    let wl = layout.word.letters();
    let mut loops = Vec::new();
    let mut seen = vec![false; edges.len()];
    for i in 0..layout.intervals.len() {
        if seen[i] {
            continue;
        }
        let path = trace(2 * i, ivs, conns, &edges, &mut seen);
        let intervals: Vec<usize> = path.iter().step_by(2).copied().collect();
        let read: Vec<Letter> = intervals
            .iter()
            .map(|&j| {
                let iv = &layout.intervals[j];
                match iv.kind {
                    IntervalKind::W => wl[iv.slot],
                    IntervalKind::R => rl[iv.letter],
                    IntervalKind::RInv => rl[iv.letter].inverse(),
                }
            })
            .collect();
        let kinds = |k: IntervalKind| intervals.iter().all(|&j| layout.intervals[j].kind == k);
        let kind = if kinds(IntervalKind::W) {
            LoopKind::W
        } else if kinds(IntervalKind::R) {
            LoopKind::R
        } else if kinds(IntervalKind::RInv) {
            LoopKind::RInv
        } else if intervals
            .iter()
            .any(|&j| layout.intervals[j].kind == IntervalKind::W)
        {
            return Err(violation(
                "w-intervals share a loop with relator intervals",
                &intervals,
            ));
        } else {
            LoopKind::Mixed
        };
        let power = if kind == LoopKind::W {
            None
        } else {
            relator_power(&read, rl)
        };
        loops.push(BoundaryLoop {
            kind,
            word: read.iter().map(|l| l.compact()).collect(),
            intervals,
            power,
        });
    }

    let chi_graph = nv as i64 - edges.len() as i64;
    let expected_graph = -((layout.word.len() + 4 * layout.g * (layout.k + layout.l)) as i64);
    if chi_graph != expected_graph {
        return Err(violation(
            "graph Euler characteristic",
            &(chi_graph, expected_graph),
        ));
    }
    let chi = chi_graph + discs.len() as i64;

    // Per-component genus from V - E + F and the boundary count.
    let mut dsu = RollbackDsu::new(nv);
    for e in &edges {
        dsu.union(e.ends[0] as u32, e.ends[1] as u32);
    }
    let mut roots: Vec<u32> = (0..nv as u32).map(|v| dsu.find(v)).collect();
    roots.sort_unstable();
    roots.dedup();
    let comp = |v: usize| roots.binary_search(&dsu.find(v as u32)).unwrap();
    let mut chi_c = vec![0i64; roots.len()];
    let mut bd_c = vec![0i64; roots.len()];
    for v in 0..nv {
        chi_c[comp(v)] += 1;
    }
    for e in &edges {
        chi_c[comp(e.ends[0])] -= 1;
    }
    for dsc in &discs {
        chi_c[comp(edges[dsc.edges[0]].ends[0])] += 1;
    }
    for lp in &loops {
        bd_c[comp(2 * lp.intervals[0])] += 1;
    }
    let mut genera = Vec::with_capacity(roots.len());
    for (c, b) in chi_c.iter().zip(&bd_c) {
        let twice = 2 - c - b;
        if twice < 0 || twice % 2 != 0 {
            return Err(violation("component with impossible genus", &(c, b)));
        }
        genera.push((twice / 2) as usize);
    }

    Ok(DecoratedSurface {
        g: layout.g,
        k: layout.k,
        l: layout.l,
        word: layout.word.to_string(),
        star: d.is_star(),
        num_vertices: nv,
        edges,
        discs,
        boundary_loops: loops,
        chi_graph,
        chi,
        type_i,
        type_ii,
        genera,
        layout: layout.clone(),
    })
}

/// Collapses every rectangular type-II disc to an arc and verifies the
/// boundary axioms: one w-loop reading a rotation of `w`, R-loops reading
/// positive powers of `R` summing to `k`, R^-1-loops reading negative powers
/// summing to `-l`, and no arc between an R-loop and an R^-1-loop.
pub fn collapse(s: &DecoratedSurface) -> Result<CollapsedSurface> {
    let layout = &s.layout;
    let mut arc_of_edge = vec![usize::MAX; s.edges.len()];
    let mut arcs = Vec::new();
    for dsc in s.discs.iter().filter(|d| d.kind == DiscKind::TypeII) {
        let e = &dsc.edges;
        let ivs: Vec<usize> = e
            .iter()
            .copied()
            .filter(|&x| s.edges[x].kind.is_interval())
            .collect();
        let sides: Vec<usize> = e
            .iter()
            .copied()
            .filter(|&x| s.edges[x].kind.is_arc())
            .collect();
        let rect = e.len() == 4
            && sides.len() == 2
            && s.edges[sides[0]].kind != s.edges[sides[1]].kind
            && layout.intervals[ivs[0]].plus != layout.intervals[ivs[1]].plus;
        if !rect {
            return Err(violation("type-II disc is not a rectangle", dsc));
        }
        let (from, to) = if layout.intervals[ivs[0]].plus {
            (ivs[0], ivs[1])
        } else {
            (ivs[1], ivs[0])
        };
        let w_ends = [from, to]
            .iter()
            .filter(|&&j| layout.intervals[j].kind == IntervalKind::W)
            .count();
        let class = match w_ends {
            2 => ArcClass::WW,
            1 => ArcClass::WR,
            _ => ArcClass::RR,
        };
        for &x in &sides {
            arc_of_edge[x] = arcs.len();
        }
        arcs.push(CollapsedArc {
            gen: layout.intervals[from].gen,
            from,
            to,
            class,
        });
    }

    let discs: Vec<CollapsedDisc> = s
        .discs
        .iter()
        .filter(|d| d.kind == DiscKind::TypeI)
        .map(|d| {
            let segments: Vec<usize> = d
                .edges
                .iter()
                .copied()
                .filter(|&x| !s.edges[x].kind.is_arc())
                .collect();
            CollapsedDisc {
                w_segments: segments
                    .iter()
                    .filter(|&&x| s.edges[x].kind == EdgeKind::WConnector)
                    .count(),
                segments,
                arc_sides: d
                    .edges
                    .iter()
                    .filter(|&&x| s.edges[x].kind.is_arc())
                    .map(|&x| arc_of_edge[x])
                    .collect(),
            }
        })
        .collect();

    let chi = discs.len() as i64 - arcs.len() as i64;
    if chi != s.chi {
        return Err(violation(
            "collapse changed the Euler characteristic",
            &(s.chi, chi),
        ));
    }

    // P1
    let w_loops: Vec<&BoundaryLoop> = s
        .boundary_loops
        .iter()
        .filter(|l| l.kind == LoopKind::W)
        .collect();
    let wl = layout.word.letters();
    let p1 = w_loops.len() == 1 && {
        let read: Vec<Letter> = w_loops[0]
            .intervals
            .iter()
            .map(|&j| wl[layout.intervals[j].slot])
            .collect();
        is_rotation(wl, &read)
    };
    if !p1 {
        return Err(violation(
            "w-loop does not read a rotation of w",
            &s.boundary_loops,
        ));
    }
    // P2, P3
    let mut pos = 0i64;
    let mut neg = 0i64;
    for lp in &s.boundary_loops {
        match (lp.kind, lp.power) {
            (LoopKind::W, _) => {}
            (LoopKind::R, Some(p)) if p > 0 => pos += p,
            (LoopKind::RInv, Some(p)) if p < 0 => neg += p,
            _ => return Err(violation("relator loop does not read a power of R", lp)),
        }
    }
    if pos != s.k as i64 || neg != -(s.l as i64) {
        return Err(violation(
            "relator powers do not sum to (k, -l)",
            &(pos, neg),
        ));
    }
    // P4
    let mut loop_of = vec![LoopKind::W; layout.intervals.len()];
    for lp in &s.boundary_loops {
        for &j in &lp.intervals {
            loop_of[j] = lp.kind;
        }
    }
    for a in &arcs {
        let kinds = [loop_of[a.from], loop_of[a.to]];
        if kinds.contains(&LoopKind::R) && kinds.contains(&LoopKind::RInv) {
            return Err(violation("arc joins an R-loop to an R^-1-loop", a));
        }
    }

    let count = |c: ArcClass| arcs.iter().filter(|a| a.class == c).count();
    let (n_ww, n_wr, n_rr) = (
        count(ArcClass::WW),
        count(ArcClass::WR),
        count(ArcClass::RR),
    );
    if 2 * n_rr + n_wr != 4 * s.g * (s.k + s.l) {
        return Err(violation("arc census", &(n_ww, n_wr, n_rr)));
    }
    Ok(CollapsedSurface {
        g: s.g,
        k: s.k,
        l: s.l,
        word_len: layout.word.len(),
        arcs,
        discs,
        boundary_loops: s.boundary_loops.clone(),
        chi,
        n_ww,
        n_wr,
        n_rr,
    })
}

/// Components of `{pre-piece discs} ∪ {WR-arcs}`, where a pre-piece disc has
/// exactly one w-loop segment on its boundary.
pub fn piece_decomposition(c: &CollapsedSurface) -> Result<Vec<Piece>> {
    let nd = c.discs.len();
    let pre: Vec<bool> = c.discs.iter().map(|d| d.w_segments == 1).collect();
    let mut dsu = RollbackDsu::new(nd + c.arcs.len());
    for (i, d) in c.discs.iter().enumerate().filter(|(i, _)| pre[*i]) {
        let wr = d
            .arc_sides
            .iter()
            .filter(|&&a| c.arcs[a].class == ArcClass::WR)
            .count();
        let ww = d
            .arc_sides
            .iter()
            .filter(|&&a| c.arcs[a].class == ArcClass::WW)
            .count();
        if wr != 2 || ww != 0 {
            return Err(violation("pre-piece disc without exactly two WR sides", d));
        }
        for &a in &d.arc_sides {
            if c.arcs[a].class == ArcClass::WR {
                dsu.union(i as u32, (nd + a) as u32);
            }
        }
    }
    let mut by_root: std::collections::BTreeMap<u32, Piece> = Default::default();
    let mut incidences: std::collections::BTreeMap<u32, usize> = Default::default();
    for (a, arc) in c.arcs.iter().enumerate() {
        if arc.class == ArcClass::WR {
            let p = by_root
                .entry(dsu.find((nd + a) as u32))
                .or_insert_with(|| Piece {
                    discs: Vec::new(),
                    wr_arcs: Vec::new(),
                    e_count: 0,
                    he_count: 0,
                    chi: 0,
                });
            p.wr_arcs.push(a);
            p.e_count += 1;
        }
    }
    for (i, d) in c.discs.iter().enumerate().filter(|(i, _)| pre[*i]) {
        let root = dsu.find(i as u32);
        let p = by_root
            .get_mut(&root)
            .expect("a pre-piece disc meets a WR-arc");
        p.discs.push(i);
        p.he_count += d
            .arc_sides
            .iter()
            .filter(|&&a| c.arcs[a].class == ArcClass::RR)
            .count();
        *incidences.entry(root).or_default() += 2;
    }
    let mut pieces = Vec::with_capacity(by_root.len());
    for (root, mut p) in by_root {
        let inc = incidences.get(&root).copied().unwrap_or(0) as i64;
        p.chi = (p.discs.len() + p.wr_arcs.len()) as i64 - inc;
        let whole_loop = p
            .discs
            .iter()
            .map(|&i| c.discs[i].w_segments)
            .sum::<usize>()
            == c.word_len;
        if !(p.chi == 1 || (p.chi == 0 && whole_loop)) {
            return Err(violation("piece with unexpected Euler characteristic", &p));
        }
        pieces.push(p);
    }
    Ok(pieces)
}

/// Pieces of `c`, failing with a dump on the first piece that breaks
/// `e <= (2g-1) he + 2g chi`.
pub fn checked_pieces(c: &CollapsedSurface) -> Result<Vec<Piece>> {
    let pieces = piece_decomposition(c)?;
    if let Some(p) = pieces.iter().find(|p| !p.satisfies_inequality(c.g)) {
        return Err(violation("piece inequality", &(p, c)));
    }
    Ok(pieces)
}

/// One line of a starred scan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurfaceRecord {
    pub chi: i64,
    pub discs: usize,
    pub boundary_powers: Vec<i64>,
}

impl SurfaceRecord {
    pub fn of(c: &CollapsedSurface) -> Self {
        SurfaceRecord {
            chi: c.chi,
            discs: c.discs.len(),
            boundary_powers: c.boundary_loops.iter().filter_map(|l| l.power).collect(),
        }
    }
}

/// Totals over `MATCH*(w, k, l)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StarScan {
    pub count: u128,
    pub max_chi: Option<i64>,
    /// Surfaces with `chi > -(k+l)`.
    pub bound_violations: u128,
    pub pieces: u128,
    pub piece_violations: u128,
    /// Dump of the first failure, if any.
    pub first_violation: Option<String>,
}

impl StarScan {
    fn merge(mut self, o: StarScan) -> StarScan {
        self.count += o.count;
        self.max_chi = match (self.max_chi, o.max_chi) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        self.bound_violations += o.bound_violations;
        self.pieces += o.pieces;
        self.piece_violations += o.piece_violations;
        self.first_violation = self.first_violation.or(o.first_violation);
        self
    }
}

/// Builds and collapses every starred surface, recording the Euler
/// characteristic bound and, with `pieces`, the piece inequality. Axiom
/// failures abort with their dump. `visit` sees every datum in order.
pub fn scan_matchstar<F>(
    w: &Word,
    k: usize,
    l: usize,
    opts: &MatchOptions,
    pieces: bool,
    mut visit: F,
) -> Result<StarScan>
where
    F: FnMut(&MatchingDatum, &CollapsedSurface),
{
    let opts = MatchOptions {
        star: true,
        ..*opts
    };
    let iter = enumerate_match(w, k, l, &opts)?;
    let layout = iter.layout().clone();
    let bound = -((k + l) as i64);
    let mut scan = StarScan::default();
    for d in iter {
        let c = collapse(&build_on(&layout, &d)?)?;
        visit(&d, &c);
        scan.count += 1;
        scan.max_chi = Some(scan.max_chi.map_or(c.chi, |m| m.max(c.chi)));
        if c.chi > bound {
            scan.bound_violations += 1;
            if scan.first_violation.is_none() {
                scan.first_violation = serde_json::to_string(&(&d, &c)).ok();
            }
        }
        if pieces {
            let ps = piece_decomposition(&c)?;
            scan.pieces += ps.len() as u128;
            for p in ps.iter().filter(|p| !p.satisfies_inequality(c.g)) {
                scan.piece_violations += 1;
                if scan.first_violation.is_none() {
                    scan.first_violation = serde_json::to_string(&(&d, p, &c)).ok();
                }
            }
        }
    }
    Ok(scan)
}

/// Parallel form of [`scan_matchstar`] without a visitor.
pub fn scan_matchstar_par(
    w: &Word,
    k: usize,
    l: usize,
    opts: &MatchOptions,
    pieces: bool,
) -> Result<StarScan> {
    let opts = MatchOptions {
        star: true,
        ..*opts
    };
    let iter = enumerate_match(w, k, l, &opts)?;
    let layout = iter.layout().clone();
    let bound = -((k + l) as i64);
    iter.par_bridge()
        .map(|d| -> Result<StarScan> {
            let c = collapse(&build_on(&layout, &d)?)?;
            let mut s = StarScan {
                count: 1,
                max_chi: Some(c.chi),
                ..Default::default()
            };
            if c.chi > bound {
                s.bound_violations = 1;
                s.first_violation = serde_json::to_string(&(&d, &c)).ok();
            }
            if pieces {
                let ps = piece_decomposition(&c)?;
                s.pieces = ps.len() as u128;
                for p in ps.iter().filter(|p| !p.satisfies_inequality(c.g)) {
                    s.piece_violations += 1;
                    if s.first_violation.is_none() {
                        s.first_violation = serde_json::to_string(&(&d, p, &c)).ok();
                    }
                }
            }
            Ok(s)
        })
        .try_reduce(StarScan::default, |a, b| Ok(a.merge(b)))
}

/// Largest `chi` of a collapsed surface over `MATCH*(w, k, l)`.
pub fn max_chi_over_matchstar(w: &Word, k: usize, l: usize) -> Result<i64> {
    let opts = MatchOptions {
        general_genus: true,
        ..Default::default()
    };
    scan_matchstar_par(w, k, l, &opts, false)?
        .max_chi
        .ok_or_else(|| Error::InvalidArgument("MATCH* is empty".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matchenum::count_n_exponent;

    fn abab() -> Word {
        Word::parse_free("abAB", 4).unwrap()
    }

    fn star_opts() -> MatchOptions {
        MatchOptions::star(true)
    }

    #[test]
    fn identity_datum_graph() {
        let w = abab();
        let d = enumerate_match(&w, 1, 0, &star_opts())
            .unwrap()
            .next()
            .unwrap();
        let s = build_surface(&d, &w).unwrap();
        assert_eq!(s.chi_graph, -12);
        assert_eq!(s.chi, -12 + s.discs.len() as i64);
        assert!(s.boundary_loops.len() >= 2);
    }

    #[test]
    fn type_one_discs_match_the_n_exponent() {
        let w = abab();
        for d in enumerate_match(&w, 1, 1, &MatchOptions::default())
            .unwrap()
            .step_by(997)
            .take(40)
        {
            let s = build_surface(&d, &w).unwrap();
            assert_eq!(s.type_i, count_n_exponent(&d, &w).unwrap());
        }
    }

    #[test]
    fn commutator_single_relator() {
        let w = abab();
        let mut n = 0;
        let scan = scan_matchstar(&w, 1, 0, &star_opts(), true, |_, c| {
            n += 1;
            let r: Vec<_> = c
                .boundary_loops
                .iter()
                .filter(|l| l.kind == LoopKind::R)
                .collect();
            assert_eq!(r.len(), 1);
            assert_eq!(r[0].power, Some(1));
            assert_eq!(2 * c.n_rr + c.n_wr, 8);
        })
        .unwrap();
        assert_eq!(n, 4);
        assert_eq!(scan.count, 4);
        assert!(scan.max_chi.unwrap() <= -1);
        assert_eq!(scan.bound_violations, 0);
        assert_eq!(scan.piece_violations, 0);
    }

    #[test]
    fn both_signs_bound() {
        let w = abab();
        let scan = scan_matchstar_par(&w, 1, 1, &star_opts(), true).unwrap();
        assert!(scan.max_chi.unwrap() <= -2);
        assert_eq!(scan.bound_violations + scan.piece_violations, 0);
    }

    #[test]
    fn relator_word_bounds_an_annulus() {
        let w = surface_relator(2);
        assert_eq!(max_chi_over_matchstar(&w, 0, 1).unwrap(), 0);
    }

    #[test]
    fn single_arc_piece() {
        let p = Piece {
            discs: vec![],
            wr_arcs: vec![0],
            e_count: 1,
            he_count: 0,
            chi: 1,
        };
        assert!(p.satisfies_inequality(2));
    }

    #[test]
    fn rotations_and_powers() {
        let r = surface_relator(2);
        let rl = r.letters();
        assert_eq!(relator_power(r.rotate(3).letters(), rl), Some(1));
        assert_eq!(relator_power(r.inverse().letters(), rl), Some(-1));
        let rr = r.concat(&r);
        assert_eq!(relator_power(rr.rotate(5).letters(), rl), Some(2));
        assert_eq!(relator_power(&rl[..4], rl), None);
    }
}
