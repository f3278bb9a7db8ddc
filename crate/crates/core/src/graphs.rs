//! `Z_m`-weighted graphs defining graph states.

use serde::{Deserialize, Serialize};

use crate::algebra::ModVec;
use crate::error::{Error, Result};

/// Symmetric, zero-diagonal adjacency matrix over `Z_m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct WeightedGraph {
    modulus: u32,
    adj: Vec<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    #[serde(rename = "mod")]
    modulus: u32,
    adj: Vec<Vec<i64>>,
}

impl TryFrom<GraphJson> for WeightedGraph {
    type Error = Error;

    fn try_from(g: GraphJson) -> Result<Self> {
        if g.adj.len() != g.n {
            return Err(Error::InvalidGraph(format!(
                "adjacency has {} rows, expected {}",
                g.adj.len(),
                g.n
            )));
        }
        for row in &g.adj {
            if let Some(e) = row.iter().find(|&&e| e < 0 || e >= g.modulus as i64) {
                return Err(Error::InvalidGraph(format!(
                    "entry {e} not reduced mod {}",
                    g.modulus
                )));
            }
        }
        WeightedGraph::from_adjacency(g.modulus, g.adj)
    }
}

impl From<WeightedGraph> for GraphJson {
    fn from(g: WeightedGraph) -> Self {
        GraphJson {
            n: g.adj.len(),
            modulus: g.modulus,
            adj: g
                .adj
                .into_iter()
                .map(|r| r.into_iter().map(i64::from).collect())
                .collect(),
        }
    }
}

impl WeightedGraph {
    /// Validates symmetry and the zero diagonal; entries are reduced mod `m`.
    pub fn from_adjacency(modulus: u32, adj: Vec<Vec<i64>>) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::InvalidGraph(format!("modulus {modulus} < 2")));
        }
        let n = adj.len();
        let m = modulus as i64;
        let adj: Vec<Vec<u32>> = adj
            .into_iter()
            .map(|r| r.into_iter().map(|e| e.rem_euclid(m) as u32).collect())
            .collect();
        for (a, row) in adj.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGraph(format!(
                    "row {a} has length {}, expected {n}",
                    row.len()
                )));
            }
            if row[a] != 0 {
                return Err(Error::InvalidGraph(format!("nonzero diagonal at {a}")));
            }
            for b in 0..a {
                if adj[a][b] != adj[b][a] {
                    return Err(Error::InvalidGraph(format!("asymmetric at ({a},{b})")));
                }
            }
        }
        Ok(WeightedGraph { modulus, adj })
    }

    pub fn empty(n: usize, modulus: u32) -> Self {
        WeightedGraph {
            modulus,
            adj: vec![vec![0; n]; n],
        }
    }

    /// Builds a graph from a weighted edge list of 0-based vertex pairs.
    pub fn from_edges(n: usize, modulus: u32, edges: &[(usize, usize, i64)]) -> Result<Self> {
        let mut adj = vec![vec![0i64; n]; n];
        for &(a, b, w) in edges {
            if a >= n || b >= n || a == b {
                return Err(Error::InvalidGraph(format!("bad edge ({a},{b})")));
            }
            adj[a][b] = w;
            adj[b][a] = w;
        }
        WeightedGraph::from_adjacency(modulus, adj)
    }

    /// The cycle `L_n`: edge `(i, i+1 mod n)` with weight `w`.
    pub fn loop_graph(n: usize, modulus: u32, weight: i64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidGraph(format!("loop graph needs n >= 3, got {n}")));
        }
        if modulus < 2 || weight.rem_euclid(modulus as i64) == 0 {
            return Err(Error::InvalidGraph(format!(
                "edge weight {weight} vanishes mod {modulus}"
            )));
        }
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, weight)).collect();
        WeightedGraph::from_edges(n, modulus, &edges)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn weight(&self, a: usize, b: usize) -> u32 {
        self.adj[a][b]
    }

    pub fn adjacency(&self) -> &[Vec<u32>] {
        &self.adj
    }

    fn check_vec(&self, s: &ModVec) -> Result<()> {
        if s.modulus() != self.modulus {
            return Err(Error::ModulusMismatch(s.modulus(), self.modulus));
        }
        if s.len() != self.n() {
            return Err(Error::LengthMismatch(s.len(), self.n()));
        }
        Ok(())
    }

    /// `(s·Γ)_j = Σ_i s_i Γ_ij mod m`.
    pub fn action(&self, s: &ModVec) -> Result<ModVec> {
        self.check_vec(s)?;
        Ok(self.action_unchecked(s))
    }

    pub(crate) fn action_unchecked(&self, s: &ModVec) -> ModVec {
        let n = self.n();
        let m = self.modulus as u64;
        let mut out = vec![0i64; n];
        for (i, row) in self.adj.iter().enumerate() {
            let si = s.get(i) as u64;
            if si == 0 {
                continue;
            }
            for (j, &g) in row.iter().enumerate() {
                out[j] = ((out[j] as u64 + si * g as u64) % m) as i64;
            }
        }
        ModVec::new(self.modulus, out)
    }

    /// `Σ_{a<b} Γ_ab s_a s_b mod m`, the exponent of the graph-state
    /// amplitude at basis label `s`.
    pub fn pair_form(&self, s: &[u32]) -> u64 {
        let m = self.modulus as u64;
        let mut acc = 0u64;
        for a in 0..s.len() {
            if s[a] == 0 {
                continue;
            }
            for b in a + 1..s.len() {
                acc = (acc + self.adj[a][b] as u64 * s[a] as u64 % m * s[b] as u64) % m;
            }
        }
        acc
    }

    pub fn max_degree(&self) -> usize {
        self.adj
            .iter()
            .map(|r| r.iter().filter(|&&w| w != 0).count())
            .max()
            .unwrap_or(0)
    }
}
