use serde::{Deserialize, Serialize};

use super::model::Qubo;
use crate::error::{Error, Result};

/// `lower <= sum_k a_k x_{q_k} + constant <= upper` over integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub terms: Vec<(usize, i64)>,
    #[serde(default)]
    pub constant: i64,
    pub lower: i64,
    pub upper: i64,
}

impl LinearConstraint {
    pub fn one_hot(qubits: &[usize]) -> Self {
        Self { terms: qubits.iter().map(|&q| (q, 1)).collect(), constant: 0, lower: 1, upper: 1 }
    }

    pub fn value(&self, x: usize) -> i64 {
        self.constant
            + self
                .terms
                .iter()
                .filter(|(q, _)| (x >> q) & 1 == 1)
                .map(|(_, a)| a)
                .sum::<i64>()
    }

    pub fn satisfied(&self, x: usize) -> bool {
        (self.lower..=self.upper).contains(&self.value(x))
    }

    pub fn qubits(&self) -> Vec<usize> {
        self.terms.iter().map(|t| t.0).collect()
    }

    pub fn is_equality(&self) -> bool {
        self.lower == self.upper
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CopInstance {
    /// Partition the vertices into `k` subsets maximizing the number of cut edges.
    MaxKCut { n_vertices: usize, edges: Vec<(usize, usize)>, k: usize },
    /// Quadratic assignment of `n_f` facilities to `n_f` locations.
    Qap { flow: Vec<Vec<f64>>, distance: Vec<Vec<f64>> },
    /// Quadratic knapsack; `profits[i][j]` for `i <= j` (lower triangle ignored).
    Qkp { profits: Vec<Vec<f64>>, weights: Vec<i64>, capacity: i64 },
    /// Arbitrary quadratic objective under linear constraints. Equality
    /// constraints are penalized quadratically; inequalities are only checked.
    Generic { objective: QuboSpec, constraints: Vec<LinearConstraint> },
}

/// Serializable QUBO used inside instance files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuboSpec {
    pub n: usize,
    pub entries: Vec<(usize, usize, f64)>,
    #[serde(default)]
    pub offset: f64,
}

impl QuboSpec {
    pub fn to_qubo(&self) -> Result<Qubo> {
        Qubo::from_json(&super::model::QuadraticJson {
            n: self.n,
            entries: self.entries.clone(),
            offset: self.offset,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "var", rename_all = "snake_case")]
pub enum VarLabel {
    VertexSubset { vertex: usize, subset: usize },
    FacilityLocation { facility: usize, location: usize },
    Item { item: usize },
    Bit { index: usize },
}

/// Which problem variable sits on which qubit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableLayout {
    pub labels: Vec<VarLabel>,
    /// Max-k cut: the vertex pinned to the first subset and removed from the register.
    pub fixed_vertex: Option<usize>,
}

impl VariableLayout {
    pub fn n_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn qubit_of(&self, label: &VarLabel) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

#[derive(Clone, Debug)]
pub struct Encoding {
    pub objective: Qubo,
    pub constraint: Qubo,
    pub layout: VariableLayout,
}

impl CopInstance {
    pub fn validate(&self) -> Result<()> {
        match self {
            CopInstance::MaxKCut { n_vertices, edges, k } => {
                if *k < 2 {
                    return Err(Error::InvalidArgument(format!("Max-k cut needs k >= 2, got {k}")));
                }
                if *n_vertices < 2 {
                    return Err(Error::InvalidArgument("Max-k cut needs at least 2 vertices".into()));
                }
                for &(u, v) in edges {
                    if u >= *n_vertices || v >= *n_vertices || u == v {
                        return Err(Error::InvalidArgument(format!("invalid edge ({u}, {v})")));
                    }
                }
            }
            CopInstance::Qap { flow, distance } => {
                let n = flow.len();
                if n < 2 || distance.len() != n {
                    return Err(Error::InvalidArgument("QAP matrices must be n x n with n >= 2".into()));
                }
                for m in [flow, distance] {
                    for (i, row) in m.iter().enumerate() {
                        if row.len() != n {
                            return Err(Error::InvalidArgument("QAP matrix is not square".into()));
                        }
                        for j in 0..n {
                            if row[j] != m[j][i] {
                                return Err(Error::InvalidArgument(format!(
                                    "QAP matrix not symmetric at ({i}, {j})"
                                )));
                            }
                        }
                    }
                }
            }
            CopInstance::Qkp { profits, weights, capacity } => {
                let n = weights.len();
                if n == 0 || profits.len() != n || profits.iter().any(|r| r.len() != n) {
                    return Err(Error::InvalidArgument("QKP profits must be n x n".into()));
                }
                if *capacity <= 0 {
                    return Err(Error::InvalidArgument(format!("capacity must be positive, got {capacity}")));
                }
                if weights.iter().any(|&w| w <= 0) {
                    return Err(Error::InvalidArgument("QKP weights must be positive".into()));
                }
            }
            CopInstance::Generic { objective, constraints } => {
                for c in constraints {
                    if c.lower > c.upper {
                        return Err(Error::InvalidArgument("constraint has lower > upper".into()));
                    }
                    if c.terms.iter().any(|t| t.0 >= objective.n) {
                        return Err(Error::InvalidArgument("constraint references an unknown variable".into()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            CopInstance::MaxKCut { n_vertices, k, .. } => k * (n_vertices - 1),
            CopInstance::Qap { flow, .. } => flow.len() * flow.len(),
            CopInstance::Qkp { weights, .. } => weights.len(),
            CopInstance::Generic { objective, .. } => objective.n,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            CopInstance::MaxKCut { .. } => "maxkcut",
            CopInstance::Qap { .. } => "qap",
            CopInstance::Qkp { .. } => "qkp",
            CopInstance::Generic { .. } => "generic",
        }
    }

    /// Constraint family over qubit indices.
    pub fn constraints(&self) -> Vec<LinearConstraint> {
        match self {
            CopInstance::MaxKCut { .. } => {
                self.one_hot_groups().iter().map(|g| LinearConstraint::one_hot(g)).collect()
            }
            CopInstance::Qap { flow, .. } => {
                let n = flow.len();
                let mut out: Vec<LinearConstraint> =
                    self.one_hot_groups().iter().map(|g| LinearConstraint::one_hot(g)).collect();
                for i in 0..n {
                    let row: Vec<usize> = (0..n).map(|a| qap_qubit(n, i, a)).collect();
                    out.push(LinearConstraint::one_hot(&row));
                }
                out
            }
            CopInstance::Qkp { weights, capacity, .. } => vec![LinearConstraint {
                terms: weights.iter().enumerate().map(|(i, &w)| (i, w)).collect(),
                constant: 0,
                lower: 0,
                upper: *capacity,
            }],
            CopInstance::Generic { constraints, .. } => constraints.clone(),
        }
    }

    /// Disjoint one-hot groups compressed by the deterministic method: one per
    /// non-fixed vertex (Max-k cut), per location column (QAP), or the
    /// one-hot constraints of a generic instance when they are disjoint.
    pub fn one_hot_groups(&self) -> Vec<Vec<usize>> {
        match self {
            CopInstance::MaxKCut { n_vertices, k, .. } => (1..*n_vertices)
                .map(|v| (0..*k).map(|s| maxkcut_qubit(*k, v, s)).collect())
                .collect(),
            CopInstance::Qap { flow, .. } => {
                let n = flow.len();
                (0..n).map(|a| (0..n).map(|i| qap_qubit(n, i, a)).collect()).collect()
            }
            CopInstance::Generic { constraints, .. } => {
                let groups: Vec<Vec<usize>> = constraints
                    .iter()
                    .filter(|c| c.constant == 0 && c.lower == 1 && c.upper == 1 && c.terms.iter().all(|t| t.1 == 1))
                    .map(|c| c.qubits())
                    .collect();
                let mut seen = std::collections::HashSet::new();
                if groups.iter().flatten().all(|q| seen.insert(*q)) {
                    groups
                } else {
                    Vec::new()
                }
            }
            CopInstance::Qkp { .. } => Vec::new(),
        }
    }

    pub fn check_feasible(&self, x: usize) -> bool {
        self.constraints().iter().all(|c| c.satisfied(x))
    }

    pub fn check_feasible_bits(&self, bits: &[bool]) -> Result<bool> {
        let n = self.n_qubits();
        if bits.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: bits.len() });
        }
        Ok(self.check_feasible(super::model::bits_to_index(bits)))
    }

    pub fn encode(&self) -> Result<Encoding> {
        self.validate()?;
        match self {
            CopInstance::MaxKCut { n_vertices, edges, k } => Ok(encode_maxkcut(*n_vertices, edges, *k)),
            CopInstance::Qap { flow, distance } => Ok(encode_qap(flow, distance)),
            CopInstance::Qkp { profits, weights, capacity } => Ok(encode_qkp(profits, weights, *capacity)),
            CopInstance::Generic { objective, constraints } => {
                let obj = objective.to_qubo()?;
                let mut cst = Qubo::new(objective.n);
                for c in constraints.iter().filter(|c| c.is_equality()) {
                    let terms: Vec<(usize, f64)> = c.terms.iter().map(|&(q, a)| (q, a as f64)).collect();
                    cst.add_squared_linear(&terms, (c.constant - c.lower) as f64, 1.0);
                }
                let layout = VariableLayout {
                    labels: (0..objective.n).map(|index| VarLabel::Bit { index }).collect(),
                    fixed_vertex: None,
                };
                Ok(Encoding { objective: obj, constraint: cst, layout })
            }
        }
    }
}

pub fn maxkcut_qubit(k: usize, vertex: usize, subset: usize) -> usize {
    (vertex - 1) * k + subset
}

pub fn qap_qubit(n_f: usize, facility: usize, location: usize) -> usize {
    facility * n_f + location
}

/// Objective on feasible states is minus the number of cut edges, with
/// vertex 0 pinned to subset 0; the constraint is one one-hot per other vertex.
fn encode_maxkcut(n_vertices: usize, edges: &[(usize, usize)], k: usize) -> Encoding {
    let n = k * (n_vertices - 1);
    let mut obj = Qubo::new(n);
    for &(u, v) in edges {
        let (u, v) = if u < v { (u, v) } else { (v, u) };
        if u == 0 {
            // uncut exactly when v shares vertex 0's subset
            obj.add(maxkcut_qubit(k, v, 0), maxkcut_qubit(k, v, 0), 1.0);
        } else {
            for s in 0..k {
                obj.add(maxkcut_qubit(k, u, s), maxkcut_qubit(k, v, s), 1.0);
            }
        }
    }
    obj.add_offset(-(edges.len() as f64));
    let mut cst = Qubo::new(n);
    for v in 1..n_vertices {
        let group: Vec<(usize, f64)> = (0..k).map(|s| (maxkcut_qubit(k, v, s), 1.0)).collect();
        cst.add_squared_linear(&group, -1.0, 1.0);
    }
    let labels = (1..n_vertices)
        .flat_map(|vertex| (0..k).map(move |subset| VarLabel::VertexSubset { vertex, subset }))
        .collect();
    Encoding { objective: obj, constraint: cst, layout: VariableLayout { labels, fixed_vertex: Some(0) } }
}

fn encode_qap(flow: &[Vec<f64>], distance: &[Vec<f64>]) -> Encoding {
    let nf = flow.len();
    let n = nf * nf;
    let mut obj = Qubo::new(n);
    for i in 0..nf {
        for j in (0..nf).filter(|&j| j != i) {
            for a in 0..nf {
                for b in (0..nf).filter(|&b| b != a) {
                    let v = flow[i][j] * distance[a][b];
                    if v != 0.0 {
                        obj.add(qap_qubit(nf, i, a), qap_qubit(nf, j, b), v);
                    }
                }
            }
        }
    }
    let mut cst = Qubo::new(n);
    for i in 0..nf {
        let row: Vec<(usize, f64)> = (0..nf).map(|a| (qap_qubit(nf, i, a), 1.0)).collect();
        cst.add_squared_linear(&row, -1.0, 1.0);
    }
    for a in 0..nf {
        let col: Vec<(usize, f64)> = (0..nf).map(|i| (qap_qubit(nf, i, a), 1.0)).collect();
        cst.add_squared_linear(&col, -1.0, 1.0);
    }
    let labels = (0..nf)
        .flat_map(|facility| (0..nf).map(move |location| VarLabel::FacilityLocation { facility, location }))
        .collect();
    Encoding { objective: obj, constraint: cst, layout: VariableLayout { labels, fixed_vertex: None } }
}

fn encode_qkp(profits: &[Vec<f64>], weights: &[i64], capacity: i64) -> Encoding {
    let n = weights.len();
    let mut obj = Qubo::new(n);
    for i in 0..n {
        for j in i..n {
            if profits[i][j] != 0.0 {
                obj.add(i, j, -profits[i][j]);
            }
        }
    }
    let mut cst = Qubo::new(n);
    let c = capacity as f64;
    let terms: Vec<(usize, f64)> = weights.iter().enumerate().map(|(i, &w)| (i, w as f64 / c)).collect();
    cst.add_squared_linear(&terms, 0.0, 1.0);
    let labels = (0..n).map(|item| VarLabel::Item { item }).collect();
    Encoding { objective: obj, constraint: cst, layout: VariableLayout { labels, fixed_vertex: None } }
}
