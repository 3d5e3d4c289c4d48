use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Base graph incidence matrix: `b[i][j]` edges between check i and symbol j.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Protograph {
    n_c: usize,
    n_v: usize,
    b: Vec<Vec<usize>>,
}

impl Protograph {
    pub fn zeros(n_c: usize, n_v: usize) -> Self {
        Protograph {
            n_c,
            n_v,
            b: vec![vec![0; n_v]; n_c],
        }
    }

    pub fn from_rows(rows: Vec<Vec<usize>>) -> Result<Self> {
        let n_v = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != n_v) {
            return Err(Error::LengthMismatch {
                expected: n_v,
                got: r.len(),
            });
        }
        Ok(Protograph {
            n_c: rows.len(),
            n_v,
            b: rows,
        })
    }

    pub fn n_c(&self) -> usize {
        self.n_c
    }

    pub fn n_v(&self) -> usize {
        self.n_v
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.b[i][j]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.b
    }

    pub fn col_sums(&self) -> Vec<usize> {
        (0..self.n_v)
            .map(|j| self.b.iter().map(|r| r[j]).sum())
            .collect()
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.b.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn num_edges(&self) -> usize {
        self.b.iter().flatten().sum()
    }

    pub fn max_entry(&self) -> usize {
        self.b.iter().flatten().copied().max().unwrap_or(0)
    }

    fn add_edge(&mut self, i: usize, j: usize) {
        self.b[i][j] += 1;
    }
}

impl fmt::Display for Protograph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.b {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for Protograph {
    type Err = Error;

    /// Whitespace-separated nonnegative integers, one row per line.
    fn from_str(s: &str) -> Result<Self> {
        let rows = s
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                l.split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|t| !t.is_empty())
                    .map(|t| {
                        t.parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad protograph entry {t:?}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Protograph::from_rows(rows)
    }
}

/// Node degree sequence, stored nondecreasing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSequence {
    values: Vec<usize>,
}

impl DegreeSequence {
    pub fn new(values: Vec<usize>) -> Result<Self> {
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidParameter(
                "degree sequence must be nondecreasing".into(),
            ));
        }
        Ok(DegreeSequence { values })
    }

    pub fn uniform(len: usize, degree: usize) -> Self {
        DegreeSequence {
            values: vec![degree; len],
        }
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> usize {
        self.values.iter().sum()
    }
}

/// Progressive edge growth on an n_c×n_v protograph.
///
/// Symbol nodes are processed in order; each new edge of symbol j goes to a
/// check node as far as possible from j in the current graph (unreachable
/// checks first). Ties prefer the lowest current check degree; remaining
/// ties go to the lowest index for seed 0 and to a seeded random choice
/// otherwise. A symbol already adjacent to every check
/// receives a parallel edge, chosen by the same tie rules among
/// checks whose multiplicity is still below `max_multiplicity`.
pub fn peg_protograph(
    n_c: usize,
    n_v: usize,
    ds: &DegreeSequence,
    max_multiplicity: usize,
    seed: u64,
) -> Result<Protograph> {
    peg_protograph_with_checks(n_c, n_v, ds, None, max_multiplicity, seed)
}

/// As [`peg_protograph`], additionally steering toward a target check degree
/// sequence `dc`. The symbol sequence is always met exactly; checks that
/// already reached their target are used only when no other candidate
/// exists, so the achieved check degrees (see [`Protograph::row_sums`]) may
/// differ from `dc`.
pub fn peg_protograph_with_checks(
    n_c: usize,
    n_v: usize,
    ds: &DegreeSequence,
    dc: Option<&DegreeSequence>,
    max_multiplicity: usize,
    seed: u64,
) -> Result<Protograph> {
    if n_c == 0 || n_v == 0 {
        return Err(Error::InvalidParameter(
            "protograph needs at least one check and one symbol node".into(),
        ));
    }
    if ds.len() != n_v {
        return Err(Error::LengthMismatch {
            expected: n_v,
            got: ds.len(),
        });
    }
    if let Some(dc) = dc {
        if dc.len() != n_c {
            return Err(Error::LengthMismatch {
                expected: n_c,
                got: dc.len(),
            });
        }
    }
    let max_multiplicity = max_multiplicity.max(1);
    if let Some(&d) = ds.values().iter().find(|&&d| d > n_c * max_multiplicity) {
        return Err(Error::Infeasible(format!(
            "symbol degree {d} exceeds {n_c} checks x multiplicity {max_multiplicity}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut proto = Protograph::zeros(n_c, n_v);
    let mut check_deg = vec![0usize; n_c];
    for (j, &deg) in ds.values().iter().enumerate() {
        for _ in 0..deg {
            let depth = check_depths(&proto, j);
            let fresh: Vec<usize> = (0..n_c).filter(|&c| proto.b[c][j] == 0).collect();
            let candidates: Vec<usize> = if fresh.is_empty() {
                (0..n_c)
                    .filter(|&c| proto.b[c][j] < max_multiplicity)
                    .collect()
            } else {
                let far = fresh.iter().map(|&c| depth[c]).max().unwrap_or(0);
                fresh.into_iter().filter(|&c| depth[c] == far).collect()
            };
            let under_target = |c: &usize| dc.is_none_or(|dc| check_deg[*c] < dc.values()[*c]);
            let preferred: Vec<usize> = candidates.iter().copied().filter(under_target).collect();
            let pool = if preferred.is_empty() {
                candidates
            } else {
                preferred
            };
            let low = pool
                .iter()
                .map(|&c| check_deg[c])
                .min()
                .ok_or_else(|| Error::Infeasible(format!("no check left for symbol {j}")))?;
            let ties: Vec<usize> = pool.into_iter().filter(|&c| check_deg[c] == low).collect();
            let c = if seed == 0 {
                ties[0]
            } else {
                *ties.choose(&mut rng).expect("nonempty")
            };
            proto.add_edge(c, j);
            check_deg[c] += 1;
        }
    }
    Ok(proto)
}

/// BFS distance (in check-to-check hops) from symbol j's neighborhood to
/// every check; `usize::MAX` for unreachable checks.
fn check_depths(proto: &Protograph, j: usize) -> Vec<usize> {
    let mut depth = vec![usize::MAX; proto.n_c];
    let mut seen_sym = vec![false; proto.n_v];
    seen_sym[j] = true;
    let mut queue = VecDeque::new();
    for (c, d) in depth.iter_mut().enumerate() {
        if proto.b[c][j] > 0 {
            *d = 0;
            queue.push_back(c);
        }
    }
    while let Some(c) = queue.pop_front() {
        for (v, seen) in seen_sym.iter_mut().enumerate() {
            if proto.b[c][v] == 0 || *seen {
                continue;
            }
            *seen = true;
            for c2 in 0..proto.n_c {
                if proto.b[c2][v] > 0 && depth[c2] == usize::MAX {
                    depth[c2] = depth[c] + 1;
                    queue.push_back(c2);
                }
            }
        }
    }
    depth
}
