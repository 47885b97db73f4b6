//! Lifting outline rectangles to latin squares.
//!
//! Every outline rectangle is the reduction of some latin square. The
//! splitting steps here make that constructive: a row block of size `p` is
//! split into blocks `a` and `p - a` by extracting a sub-multigraph with
//! prescribed degrees from the row's column-by-symbol incidence multigraph,
//! which is a feasible-flow problem. Columns are handled by transposing, and
//! symbol classes of a fully refined outline are split into perfect
//! matchings of the regular bipartite graph they form.

use crate::error::{Error, Result};
use crate::flow::{hopcroft_karp, FlowNetwork};
use crate::multiset::Multiset;
use crate::outline::OutlineRectangle;
use crate::partition::Partition;
use crate::square::{verify_realization, LatinSquare, SubsquareCertificate};

/// A bipartite multigraph stored as a dense multiplicity matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteMultigraph {
    left: usize,
    right: usize,
    mult: Vec<usize>,
}

impl BipartiteMultigraph {
    pub fn new(left: usize, right: usize) -> Self {
        Self {
            left,
            right,
            mult: vec![0; left * right],
        }
    }

    pub fn from_matrix(rows: &[Vec<usize>]) -> Result<Self> {
        let left = rows.len();
        let right = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != right) {
            return Err(Error::Malformed("ragged multiplicity matrix".into()));
        }
        Ok(Self {
            left,
            right,
            mult: rows.concat(),
        })
    }

    pub fn left_count(&self) -> usize {
        self.left
    }

    pub fn right_count(&self) -> usize {
        self.right
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        self.mult[u * self.right + v]
    }

    pub fn set_multiplicity(&mut self, u: usize, v: usize, m: usize) {
        self.mult[u * self.right + v] = m;
    }

    pub fn left_degree(&self, u: usize) -> usize {
        self.mult[u * self.right..(u + 1) * self.right].iter().sum()
    }

    pub fn right_degree(&self, v: usize) -> usize {
        (0..self.left).map(|u| self.multiplicity(u, v)).sum()
    }

    pub fn edge_count(&self) -> usize {
        self.mult.iter().sum()
    }
}

/// Finds a sub-multigraph of `g` whose left vertex `u` has degree
/// `left_target[u]` and right vertex `v` has degree `right_target[v]`.
///
/// Solved as a maximum flow: source to left vertices with capacity equal to
/// the target, left to right with capacity equal to the multiplicity, right
/// to sink with capacity equal to the target. When the flow cannot saturate
/// the source arcs the error names the minimum cut that blocks it.
pub fn extract_exact_degree_subgraph(
    g: &BipartiteMultigraph,
    left_target: &[usize],
    right_target: &[usize],
) -> Result<BipartiteMultigraph> {
    let (l, r) = (g.left, g.right);
    if left_target.len() != l || right_target.len() != r {
        return Err(Error::Malformed("degree target length mismatch".into()));
    }
    let demand: usize = left_target.iter().sum();
    let supply: usize = right_target.iter().sum();
    if demand != supply {
        return Err(Error::Infeasible(format!(
            "left targets sum to {demand}, right targets to {supply}"
        )));
    }
    for u in 0..l {
        if left_target[u] > g.left_degree(u) {
            return Err(Error::Infeasible(format!(
                "left vertex {u}: target {} exceeds degree {}",
                left_target[u],
                g.left_degree(u)
            )));
        }
    }
    for v in 0..r {
        if right_target[v] > g.right_degree(v) {
            return Err(Error::Infeasible(format!(
                "right vertex {v}: target {} exceeds degree {}",
                right_target[v],
                g.right_degree(v)
            )));
        }
    }
    let source = l + r;
    let sink = source + 1;
    let mut net = FlowNetwork::new(l + r + 2);
    for (u, &t) in left_target.iter().enumerate() {
        if t > 0 {
            net.add_arc(source, u, t as u64);
        }
    }
    let mut arcs = Vec::new();
    for u in 0..l {
        if left_target[u] == 0 {
            continue;
        }
        for v in 0..r {
            let m = g.multiplicity(u, v);
            if m > 0 && right_target[v] > 0 {
                arcs.push((u, v, net.add_arc(u, l + v, m as u64)));
            }
        }
    }
    for (v, &t) in right_target.iter().enumerate() {
        if t > 0 {
            net.add_arc(l + v, sink, t as u64);
        }
    }
    let flow = net.max_flow(source, sink) as usize;
    if flow != demand {
        let side = net.reachable(source);
        let cut_left: Vec<usize> = (0..l).filter(|&u| side[u]).collect();
        let cut_right: Vec<usize> = (0..r).filter(|&v| side[l + v]).collect();
        return Err(Error::Infeasible(format!(
            "max flow {flow} < demand {demand}; source side holds left {cut_left:?} and right {cut_right:?}"
        )));
    }
    let mut sub = BipartiteMultigraph::new(l, r);
    for (u, v, id) in arcs {
        sub.set_multiplicity(u, v, net.flow(id) as usize);
    }
    Ok(sub)
}

/// Splits one row block's cells into a piece of `a` rows and the remainder.
fn split_row_cells(
    row: &[Multiset],
    col_parts: &[usize],
    sym_parts: &[usize],
    a: usize,
) -> Result<(Vec<Multiset>, Vec<Multiset>)> {
    let v = row.len();
    let t = sym_parts.len();
    let mut g = BipartiteMultigraph::new(v, t);
    for (j, cell) in row.iter().enumerate() {
        for (s, c) in cell.iter() {
            g.set_multiplicity(j, s, c);
        }
    }
    let left: Vec<usize> = col_parts.iter().map(|q| a * q).collect();
    let right: Vec<usize> = sym_parts.iter().map(|r| a * r).collect();
    let sub = extract_exact_degree_subgraph(&g, &left, &right)
        .map_err(|e| Error::Internal(format!("row split failed on a valid outline: {e}")))?;
    let mut piece = Vec::with_capacity(v);
    let mut rest = Vec::with_capacity(v);
    for (j, cell) in row.iter().enumerate() {
        let mut taken = Multiset::new();
        let mut left_over = cell.clone();
        for (s, _) in cell.iter() {
            let m = sub.multiplicity(j, s);
            taken.add(s, m);
            left_over.remove(s, m);
        }
        piece.push(taken);
        rest.push(left_over);
    }
    Ok((piece, rest))
}

/// Replaces row block `i` (of size `p_i`) by two blocks of sizes `a` and
/// `p_i - a`; the new block `i` holds the `a`-sized piece.
pub fn split_row(o: &OutlineRectangle, i: usize, a: usize) -> Result<OutlineRectangle> {
    if i >= o.height() {
        return Err(Error::Precondition(format!("row block {i} out of range")));
    }
    let p = o.rows().part(i);
    if p < 2 || a == 0 || a >= p {
        return Err(Error::Precondition(format!(
            "cannot split row block of size {p} with a = {a}"
        )));
    }
    let row: Vec<Multiset> = (0..o.width()).map(|j| o.cell(i, j).clone()).collect();
    let (piece, rest) = split_row_cells(&row, o.cols().parts(), o.syms().parts(), a)?;
    let mut parts = o.rows().parts().to_vec();
    parts.splice(i..=i, [a, p - a]);
    let rows = Partition::new(parts)?;
    let mut cells = Vec::with_capacity((o.height() + 1) * o.width());
    for r in 0..o.height() {
        if r == i {
            cells.extend(piece.iter().cloned());
            cells.extend(rest.iter().cloned());
        } else {
            cells.extend((0..o.width()).map(|j| o.cell(r, j).clone()));
        }
    }
    OutlineRectangle::new(rows, o.cols().clone(), o.syms().clone(), cells)
}

/// Column counterpart of [`split_row`], via transposition.
pub fn split_column(o: &OutlineRectangle, j: usize, a: usize) -> Result<OutlineRectangle> {
    Ok(split_row(&o.transpose(), j, a)?.transpose())
}

/// Splits symbol class `l` (of size `r_l`) into classes `a` and `r_l - a` in
/// an outline whose row and column parts are all 1. The cells holding `l`
/// form an `r_l`-regular bipartite graph; an `a`-regular subgraph keeps
/// label `l` and the rest takes label `l + 1`. Later labels shift up by one.
pub fn split_symbol(o: &OutlineRectangle, l: usize, a: usize) -> Result<OutlineRectangle> {
    if o.rows().parts().iter().chain(o.cols().parts()).any(|&p| p != 1) {
        return Err(Error::Precondition("row and column parts must all be 1".into()));
    }
    if l >= o.syms().len() {
        return Err(Error::Precondition(format!("symbol {l} out of range")));
    }
    let r = o.syms().part(l);
    if r < 2 || a == 0 || a >= r {
        return Err(Error::Precondition(format!(
            "cannot split symbol class of size {r} with a = {a}"
        )));
    }
    let (u, v) = (o.height(), o.width());
    let mut g = BipartiteMultigraph::new(u, v);
    for x in 0..u {
        for y in 0..v {
            let cell = o.cell(x, y);
            if cell.len() != 1 {
                return Err(Error::Precondition(format!("cell ({x}, {y}) is not a singleton")));
            }
            if cell.count(l) == 1 {
                g.set_multiplicity(x, y, 1);
            }
        }
    }
    let sub = extract_exact_degree_subgraph(&g, &vec![a; u], &vec![a; v])
        .map_err(|e| Error::Internal(format!("symbol split failed on a valid outline: {e}")))?;
    let mut parts = o.syms().parts().to_vec();
    parts.splice(l..=l, [a, r - a]);
    let mut out = OutlineRectangle::empty(o.rows().clone(), o.cols().clone(), Partition::new(parts)?);
    for x in 0..u {
        for y in 0..v {
            let s = o.cell(x, y).as_singleton().expect("checked above");
            let new = match s.cmp(&l) {
                std::cmp::Ordering::Less => s,
                std::cmp::Ordering::Equal if sub.multiplicity(x, y) == 1 => l,
                std::cmp::Ordering::Equal => l + 1,
                std::cmp::Ordering::Greater => s + 1,
            };
            out.cell_mut(x, y).add(new, 1);
        }
    }
    Ok(out)
}

/// Splits the edges of a `d`-regular bipartite multigraph (both sides of
/// size `n`, edges given as `(left, right)` pairs) into `d` perfect
/// matchings; returns for every edge the index of its matching.
///
/// Even degrees are halved along Euler circuits; odd degrees first peel off
/// one perfect matching.
pub(crate) fn regular_edge_coloring(n: usize, edges: &[(usize, usize)], d: usize) -> Vec<usize> {
    let mut color = vec![0usize; edges.len()];
    let all: Vec<usize> = (0..edges.len()).collect();
    color_rec(n, edges, all, d, 0, &mut color);
    color
}

fn color_rec(
    n: usize,
    edges: &[(usize, usize)],
    subset: Vec<usize>,
    d: usize,
    base: usize,
    color: &mut [usize],
) {
    match d {
        0 => {}
        1 => {
            for e in subset {
                color[e] = base;
            }
        }
        _ if d % 2 == 1 => {
            let (matching, rest) = perfect_matching(n, edges, &subset);
            for e in matching {
                color[e] = base;
            }
            color_rec(n, edges, rest, d - 1, base + 1, color);
        }
        _ => {
            let (a, b) = euler_split(n, edges, &subset);
            color_rec(n, edges, a, d / 2, base, color);
            color_rec(n, edges, b, d / 2, base + d / 2, color);
        }
    }
}

fn perfect_matching(n: usize, edges: &[(usize, usize)], subset: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut adj_edge: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &e in subset {
        let (u, v) = edges[e];
        adj[u].push(v);
        adj_edge[u].push(e);
    }
    let mate = hopcroft_karp(n, &adj);
    let mut chosen = vec![false; edges.len()];
    let mut matching = Vec::with_capacity(n);
    for u in 0..n {
        let v = mate[u].expect("regular bipartite graphs have perfect matchings");
        let slot = adj[u].iter().position(|&w| w == v).expect("mate is a neighbour");
        let e = adj_edge[u][slot];
        chosen[e] = true;
        matching.push(e);
    }
    let rest = subset.iter().copied().filter(|&e| !chosen[e]).collect();
    (matching, rest)
}

/// Partitions the edges of an even-degree bipartite multigraph into two
/// halves with every vertex degree halved.
fn euler_split(n: usize, edges: &[(usize, usize)], subset: &[usize]) -> (Vec<usize>, Vec<usize>) {
    // vertices 0..n are left, n..2n right
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); 2 * n];
    for &e in subset {
        let (u, v) = edges[e];
        adj[u].push(e);
        adj[n + v].push(e);
    }
    let mut used = vec![false; edges.len()];
    let mut ptr = vec![0usize; 2 * n];
    let mut a = Vec::with_capacity(subset.len() / 2);
    let mut b = Vec::with_capacity(subset.len() / 2);
    for start in 0..2 * n {
        loop {
            // walk a closed trail from `start`, assigning by direction
            while ptr[start] < adj[start].len() && used[adj[start][ptr[start]]] {
                ptr[start] += 1;
            }
            if ptr[start] == adj[start].len() {
                break;
            }
            let mut at = start;
            loop {
                while ptr[at] < adj[at].len() && used[adj[at][ptr[at]]] {
                    ptr[at] += 1;
                }
                if ptr[at] == adj[at].len() {
                    break;
                }
                let e = adj[at][ptr[at]];
                used[e] = true;
                let (u, v) = edges[e];
                if at < n {
                    a.push(e);
                    at = n + v;
                } else {
                    b.push(e);
                    at = u;
                }
            }
            debug_assert_eq!(at, start, "even degrees close every trail");
        }
    }
    (a, b)
}

/// Lifts a valid outline rectangle to a latin square whose reduction modulo
/// the outline's partitions is the outline itself.
///
/// Rows are refined first, one row at a time from the top, then columns the
/// same way, then each symbol class is split into perfect matchings.
pub fn lift(o: &OutlineRectangle) -> Result<LatinSquare> {
    let report = o.validate();
    if !report.is_valid() {
        return Err(Error::Precondition(format!(
            "outline is not valid: {:?}",
            report.violations.first()
        )));
    }
    let n = o.rows().total();
    if n == 0 {
        return Ok(LatinSquare::from_cells_unchecked(0, Vec::new()));
    }
    let col_parts = o.cols().parts().to_vec();
    let sym_parts = o.syms().parts().to_vec();

    // rows: n rows, each a list of column-block cells
    let mut rows: Vec<Vec<Multiset>> = Vec::with_capacity(n);
    for i in 0..o.height() {
        let mut rest: Vec<Multiset> = (0..o.width()).map(|j| o.cell(i, j).clone()).collect();
        for _ in 1..o.rows().part(i) {
            let (piece, remainder) = split_row_cells(&rest, &col_parts, &sym_parts, 1)?;
            rows.push(piece);
            rest = remainder;
        }
        rows.push(rest);
    }

    // columns: refine each column block over the n unit rows
    let unit_rows = vec![1usize; n];
    let mut grid = vec![usize::MAX; n * n];
    let mut col = 0;
    for j in 0..o.width() {
        let mut rest: Vec<Multiset> = rows.iter_mut().map(|r| std::mem::take(&mut r[j])).collect();
        for step in 0..col_parts[j] {
            let piece = if step + 1 == col_parts[j] {
                std::mem::take(&mut rest)
            } else {
                let (piece, remainder) = split_row_cells(&rest, &unit_rows, &sym_parts, 1)?;
                rest = remainder;
                piece
            };
            for (x, cell) in piece.iter().enumerate() {
                grid[x * n + col] = cell
                    .as_singleton()
                    .ok_or_else(|| Error::Internal("unit cell is not a singleton".into()))?;
            }
            col += 1;
        }
    }

    // symbols: each class is a regular bipartite graph on rows x columns
    let mut by_class: Vec<Vec<(usize, usize)>> = vec![Vec::new(); sym_parts.len()];
    for x in 0..n {
        for y in 0..n {
            by_class[grid[x * n + y]].push((x, y));
        }
    }
    let mut cells = vec![0usize; n * n];
    for (l, edges) in by_class.iter().enumerate() {
        let base = o.syms().offset(l);
        let colors = regular_edge_coloring(n, edges, sym_parts[l]);
        for (&(x, y), c) in edges.iter().zip(colors) {
            cells[x * n + y] = base + c;
        }
    }
    let square = LatinSquare::from_cells(n, cells)
        .map_err(|e| Error::Internal(format!("lift produced a non-latin array: {e}")))?;
    debug_assert_eq!(
        &crate::outline::reduce(&square, o.rows(), o.cols(), o.syms()).expect("totals match"),
        o
    );
    Ok(square)
}

/// Lifts an outline square for `p` whose diagonal cell `i` holds `h_i^2`
/// copies of `i` to a realization of `p` in normal form.
pub fn lift_to_realization(o: &OutlineRectangle, p: &Partition) -> Result<(LatinSquare, SubsquareCertificate)> {
    if o.rows() != p || o.cols() != p || o.syms() != p {
        return Err(Error::Precondition("outline is not associated to (P, P, P)".into()));
    }
    for i in 0..p.len() {
        let h = p.part(i);
        if *o.cell(i, i) != Multiset::repeated(i, h * h) {
            return Err(Error::Precondition(format!(
                "diagonal cell {i} must hold {} copies of symbol {i}",
                h * h
            )));
        }
    }
    let square = lift(o)?;
    // diagonal cells reduce to symbol i, so block i already sits on
    // p.block(i) with symbols p.block(i)
    let cert = verify_realization(&square, p, None)
        .map_err(|e| Error::Internal(format!("lifted square is not a realization: {e}")))?;
    Ok((square, cert))
}
