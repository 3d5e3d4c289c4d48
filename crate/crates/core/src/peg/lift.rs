use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::protograph::Protograph;
use crate::error::{Error, Result};
use crate::gf::BitMatrix;

/// N×N circulant permutation matrix `x^r`: row i has its one at column (i + r) mod N.
pub fn circulant(n: usize, r: usize) -> Result<BitMatrix> {
    if r >= n {
        return Err(Error::InvalidParameter(format!(
            "shift {r} out of range for lifting factor {n}"
        )));
    }
    let mut m = BitMatrix::zeros(n, n);
    for i in 0..n {
        m.set(i, (i + r) % n, true);
    }
    Ok(m)
}

/// Protograph lifted by sums of circulant permutation matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QcLift {
    proto: Protograph,
    n: usize,
    // shifts[i][j], ascending and distinct, |shifts[i][j]| = b_ij
    shifts: Vec<Vec<Vec<usize>>>,
}

impl QcLift {
    pub fn new(n: usize, mut shifts: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("lifting factor must be positive".into()));
        }
        let n_v = shifts.first().map_or(0, Vec::len);
        for row in &mut shifts {
            if row.len() != n_v {
                return Err(Error::LengthMismatch {
                    expected: n_v,
                    got: row.len(),
                });
            }
            for entry in row.iter_mut() {
                entry.sort_unstable();
                if let Some(&s) = entry.iter().find(|&&s| s >= n) {
                    return Err(Error::InvalidParameter(format!(
                        "shift {s} out of range for lifting factor {n}"
                    )));
                }
                if entry.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::InvalidParameter(format!(
                        "duplicate shift in entry {entry:?}"
                    )));
                }
            }
        }
        let proto = Protograph::from_rows(
            shifts
                .iter()
                .map(|row| row.iter().map(Vec::len).collect())
                .collect(),
        )?;
        Ok(QcLift { proto, n, shifts })
    }

    pub fn proto(&self) -> &Protograph {
        &self.proto
    }

    pub fn lifting_factor(&self) -> usize {
        self.n
    }

    pub fn shifts(&self, i: usize, j: usize) -> &[usize] {
        &self.shifts[i][j]
    }

    pub fn expand(&self) -> BitMatrix {
        expand(self)
    }
}

/// (n_c·N)×(n_v·N) binary matrix of a lift.
pub fn expand(lift: &QcLift) -> BitMatrix {
    let n = lift.n;
    let (n_c, n_v) = (lift.proto.n_c(), lift.proto.n_v());
    let mut m = BitMatrix::zeros(n_c * n, n_v * n);
    for i in 0..n_c {
        for j in 0..n_v {
            for &s in &lift.shifts[i][j] {
                for r in 0..n {
                    m.set(i * n + r, j * n + (r + s) % n, true);
                }
            }
        }
    }
    m
}

/// Tanner graph of a partial lift: checks are nodes `0..n_c·N`, symbols follow.
struct LiftedGraph {
    n: usize,
    n_checks: usize,
    adj: Vec<Vec<usize>>,
}

impl LiftedGraph {
    fn new(n_c: usize, n_v: usize, n: usize) -> Self {
        LiftedGraph {
            n,
            n_checks: n_c * n,
            adj: vec![Vec::new(); (n_c + n_v) * n],
        }
    }

    fn check(&self, i: usize, r: usize) -> usize {
        i * self.n + r
    }

    fn symbol(&self, j: usize, c: usize) -> usize {
        self.n_checks + j * self.n + c
    }

    fn add(&mut self, i: usize, j: usize, s: usize) {
        for r in 0..self.n {
            let (c, v) = (self.check(i, r), self.symbol(j, (r + s) % self.n));
            self.adj[c].push(v);
            self.adj[v].push(c);
        }
    }

    fn remove(&mut self, i: usize, j: usize, s: usize) {
        for r in 0..self.n {
            let (c, v) = (self.check(i, r), self.symbol(j, (r + s) % self.n));
            let pc = self.adj[c].iter().rposition(|&x| x == v).expect("edge present");
            self.adj[c].swap_remove(pc);
            let pv = self.adj[v].iter().rposition(|&x| x == c).expect("edge present");
            self.adj[v].swap_remove(pv);
        }
    }

    /// Length of the shortest cycle, or None for a forest.
    fn girth(&self) -> Option<usize> {
        let nodes = self.adj.len();
        let mut best = usize::MAX;
        let mut dist = vec![usize::MAX; nodes];
        let mut parent = vec![usize::MAX; nodes];
        let mut queue = VecDeque::new();
        for root in 0..nodes {
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            dist[root] = 0;
            queue.clear();
            queue.push_back(root);
            while let Some(u) = queue.pop_front() {
                if 2 * dist[u] + 1 >= best {
                    break;
                }
                for &w in &self.adj[u] {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        parent[w] = u;
                        queue.push_back(w);
                    } else if parent[u] != w {
                        best = best.min(dist[u] + dist[w] + 1);
                    }
                }
            }
        }
        (best != usize::MAX).then_some(best)
    }

    /// Shortest path length between two nodes, or None.
    fn distance(&self, from: usize, to: usize) -> Option<usize> {
        let mut dist = vec![usize::MAX; self.adj.len()];
        dist[from] = 0;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            if u == to {
                return Some(dist[u]);
            }
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        None
    }

    /// Whether the lifted edges of circulant (i, j, s), already inserted, lie
    /// on a 4-cycle. By quasi-cyclic symmetry it suffices to test the copy at r = 0.
    fn on_four_cycle(&self, i: usize, j: usize, s: usize) -> bool {
        let c = self.check(i, 0);
        let v = self.symbol(j, s % self.n);
        self.adj[c].iter().filter(|&&v2| v2 != v).any(|&v2| {
            self.adj[v2]
                .iter()
                .filter(|&&c2| c2 != c)
                .any(|&c2| self.adj[c2].contains(&v))
        })
    }
}

/// Girth of the Tanner graph of `expand(lift)`, or None if acyclic.
pub fn lifted_girth(lift: &QcLift) -> Option<usize> {
    let mut g = LiftedGraph::new(lift.proto.n_c(), lift.proto.n_v(), lift.n);
    for i in 0..lift.proto.n_c() {
        for j in 0..lift.proto.n_v() {
            for &s in &lift.shifts[i][j] {
                g.add(i, j, s);
            }
        }
    }
    g.girth()
}

/// Node budget for the 4-cycle repair search in [`qc_peg_shifts`].
const REPAIR_BUDGET: usize = 1_000_000;

/// Greedy quasi-cyclic shift selection.
///
/// Circulants are placed edge by edge, symbol column by column. Each new
/// circulant takes the unused shift that maximizes the girth of the lifted
/// graph built so far, then the length of the shortest cycle through the new
/// edge. Remaining ties go to the smallest shift for seed 0 and to a
/// seed-derived scan order otherwise. If the greedy result still contains
/// 4-cycles, a bounded depth-first search looks for a 4-cycle-free
/// assignment and replaces it when found.
pub fn qc_peg_shifts(proto: &Protograph, n: usize, seed: u64) -> Result<QcLift> {
    if n == 0 {
        return Err(Error::InvalidParameter("lifting factor must be positive".into()));
    }
    if proto.max_entry() > n {
        return Err(Error::Infeasible(format!(
            "entry {} needs more distinct shifts than N = {n}",
            proto.max_entry()
        )));
    }
    let (n_c, n_v) = (proto.n_c(), proto.n_v());
    let order: Vec<(usize, usize)> = (0..n_v)
        .flat_map(|j| (0..n_c).flat_map(move |i| std::iter::repeat_n((i, j), proto.get(i, j))))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scan: Vec<Vec<usize>> = Vec::with_capacity(order.len());
    for _ in &order {
        let mut cand: Vec<usize> = (0..n).collect();
        if seed != 0 {
            cand.shuffle(&mut rng);
        }
        scan.push(cand);
    }

    let mut shifts = vec![vec![Vec::new(); n_v]; n_c];
    let mut graph = LiftedGraph::new(n_c, n_v, n);
    for (&(i, j), cand) in order.iter().zip(&scan) {
        let mut best: Option<((usize, usize), usize)> = None;
        for &s in cand {
            if shifts[i][j].contains(&s) {
                continue;
            }
            let local = graph
                .distance(graph.check(i, 0), graph.symbol(j, s))
                .map_or(usize::MAX, |d| d + 1);
            graph.add(i, j, s);
            let global = graph.girth().unwrap_or(usize::MAX);
            graph.remove(i, j, s);
            let score = (global, local);
            if best.is_none_or(|(b, _)| score > b) {
                best = Some((score, s));
            }
        }
        let (_, s) = best.expect("entry multiplicity is at most N");
        graph.add(i, j, s);
        shifts[i][j].push(s);
    }

    if graph.girth() == Some(4) {
        let mut g = LiftedGraph::new(n_c, n_v, n);
        let mut trial = vec![vec![Vec::new(); n_v]; n_c];
        let mut budget = REPAIR_BUDGET;
        if repair(&order, &scan, 0, &mut g, &mut trial, &mut budget) {
            shifts = trial;
        }
    }
    QcLift::new(n, shifts)
}

fn repair(
    order: &[(usize, usize)],
    scan: &[Vec<usize>],
    k: usize,
    g: &mut LiftedGraph,
    shifts: &mut Vec<Vec<Vec<usize>>>,
    budget: &mut usize,
) -> bool {
    let Some(&(i, j)) = order.get(k) else {
        return true;
    };
    for &s in &scan[k] {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        if shifts[i][j].contains(&s) {
            continue;
        }
        g.add(i, j, s);
        if !g.on_four_cycle(i, j, s) {
            shifts[i][j].push(s);
            if repair(order, scan, k + 1, g, shifts, budget) {
                return true;
            }
            shifts[i][j].pop();
        }
        g.remove(i, j, s);
    }
    false
}

/// A lift parsed from text, with optional declared `[n, k, d]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyFixture {
    pub lift: QcLift,
    pub expect: Option<[usize; 3]>,
}

pub fn parse_poly_matrix(text: &str) -> Result<QcLift> {
    parse_poly_fixture(text).map(|f| f.lift)
}

/// Parses the polynomial-matrix format: an `N=<factor>` header, an optional
/// `expect=n,k,d` line, then one row per line with entries separated by ';'.
/// Each entry is `0`, or a sum of terms `1`, `x`, `x^k` joined by '+'.
/// Blank lines and lines starting with '#' are ignored.
pub fn parse_poly_fixture(text: &str) -> Result<PolyFixture> {
    let mut n = None;
    let mut expect = None;
    let mut rows = Vec::new();
    for raw in text.lines() {
        let line: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(v) = line.strip_prefix("N=") {
            n = Some(
                v.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad lifting factor {v:?}")))?,
            );
            continue;
        }
        if let Some(v) = line.strip_prefix("expect=") {
            let parts = v
                .split(',')
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad expect value {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            let arr: [usize; 3] = parts
                .try_into()
                .map_err(|_| Error::Parse("expect needs exactly n,k,d".into()))?;
            expect = Some(arr);
            continue;
        }
        let n = n.ok_or_else(|| Error::Parse("missing N=<lifting factor> header".into()))?;
        rows.push(
            line.split(';')
                .map(|e| parse_entry(e, n))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let n = n.ok_or_else(|| Error::Parse("missing N=<lifting factor> header".into()))?;
    Ok(PolyFixture {
        lift: QcLift::new(n, rows)?,
        expect,
    })
}

fn parse_entry(entry: &str, n: usize) -> Result<Vec<usize>> {
    if entry == "0" {
        return Ok(Vec::new());
    }
    let mut shifts = Vec::new();
    for term in entry.split('+') {
        let s = match term {
            "1" => 0,
            "x" => 1,
            t => t
                .strip_prefix("x^")
                .and_then(|k| k.parse::<usize>().ok())
                .ok_or_else(|| Error::Parse(format!("malformed term {t:?}")))?,
        };
        if s >= n {
            return Err(Error::Parse(format!("shift {s} not below N = {n}")));
        }
        if shifts.contains(&s) {
            return Err(Error::Parse(format!("duplicate shift {s} in {entry:?}")));
        }
        shifts.push(s);
    }
    Ok(shifts)
}

/// Inverse of [`parse_poly_matrix`]; terms are written highest power first.
pub fn format_poly_matrix(lift: &QcLift) -> String {
    let mut out = format!("N={}\n", lift.n);
    for row in &lift.shifts {
        let cells: Vec<String> = row
            .iter()
            .map(|entry| {
                if entry.is_empty() {
                    return "0".to_string();
                }
                let terms: Vec<String> = entry
                    .iter()
                    .rev()
                    .map(|&s| match s {
                        0 => "1".to_string(),
                        1 => "x".to_string(),
                        k => format!("x^{k}"),
                    })
                    .collect();
                terms.join("+")
            })
            .collect();
        let _ = writeln!(out, "{}", cells.join("; "));
    }
    out
}
