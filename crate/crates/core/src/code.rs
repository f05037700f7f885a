//! Stabilizer codes: representation, validation, generators and metrics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PauliOp {
    I,
    X,
    Y,
    Z,
}

impl PauliOp {
    /// Symplectic (x, z) components.
    pub fn xz(self) -> (bool, bool) {
        match self {
            PauliOp::I => (false, false),
            PauliOp::X => (true, false),
            PauliOp::Y => (true, true),
            PauliOp::Z => (false, true),
        }
    }

    pub fn from_xz(x: bool, z: bool) -> PauliOp {
        match (x, z) {
            (false, false) => PauliOp::I,
            (true, false) => PauliOp::X,
            (true, true) => PauliOp::Y,
            (false, true) => PauliOp::Z,
        }
    }

    /// Product up to phase: the Pauli group is closed under multiplication.
    pub fn mul_up_to_phase(self, other: PauliOp) -> PauliOp {
        let (x1, z1) = self.xz();
        let (x2, z2) = other.xz();
        PauliOp::from_xz(x1 ^ x2, z1 ^ z2)
    }

    /// Two single-qubit Paulis anticommute iff both are non-identity and
    /// differ.
    pub fn anticommutes(self, other: PauliOp) -> bool {
        self != PauliOp::I && other != PauliOp::I && self != other
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// A Pauli string given by its sparse support.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stabilizer {
    pub label: String,
    /// Sorted by qubit index, strictly increasing, no identity entries.
    pub paulis: Vec<(usize, PauliOp)>,
}

impl Stabilizer {
    pub fn new(label: impl Into<String>, mut paulis: Vec<(usize, PauliOp)>) -> Result<Stabilizer> {
        paulis.sort_by_key(|&(q, _)| q);
        if paulis.is_empty() {
            return Err(param("stabilizer with empty support"));
        }
        for w in paulis.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(param(format!("duplicate qubit {} in stabilizer", w[0].0)));
            }
        }
        if paulis.iter().any(|&(_, p)| p == PauliOp::I) {
            return Err(param("identity entry in stabilizer support"));
        }
        Ok(Stabilizer {
            label: label.into(),
            paulis,
        })
    }

    /// Support size wt(s).
    pub fn weight(&self) -> usize {
        self.paulis.len()
    }

    /// Supported data qubits, ascending.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.paulis.iter().map(|&(q, _)| q)
    }

    pub fn pauli_at(&self, qubit: usize) -> PauliOp {
        self.paulis
            .iter()
            .find(|&&(q, _)| q == qubit)
            .map_or(PauliOp::I, |&(_, p)| p)
    }
}

/// True iff the number of positions where the two strings act with
/// different non-identity Paulis is even.
pub fn stabilizers_commute(a: &Stabilizer, b: &Stabilizer) -> bool {
    let mut anticommuting = 0usize;
    for &(q, pa) in &a.paulis {
        if pa.anticommutes(b.pauli_at(q)) {
            anticommuting += 1;
        }
    }
    anticommuting % 2 == 0
}

/// A stabilizer code: data-qubit count plus its stabilizer generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerCode {
    pub name: String,
    pub num_data: usize,
    pub stabilizers: Vec<Stabilizer>,
}

/// Report-style validation outcome; empty iff the code is valid.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub index_violations: Vec<String>,
    pub noncommuting_pairs: Vec<(String, String)>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.index_violations.is_empty() && self.noncommuting_pairs.is_empty()
    }
}

impl StabilizerCode {
    pub fn new(
        name: impl Into<String>,
        num_data: usize,
        stabilizers: Vec<Stabilizer>,
    ) -> StabilizerCode {
        StabilizerCode {
            name: name.into(),
            num_data,
            stabilizers,
        }
    }

    /// Checks index ranges and pairwise commutation.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.stabilizers.is_empty() {
            report.index_violations.push("empty stabilizer list".into());
        }
        for s in &self.stabilizers {
            for q in s.qubits() {
                if q >= self.num_data {
                    report.index_violations.push(format!(
                        "stabilizer {} references qubit {} outside 0..{}",
                        s.label, q, self.num_data
                    ));
                }
            }
        }
        for i in 0..self.stabilizers.len() {
            for j in i + 1..self.stabilizers.len() {
                let (a, b) = (&self.stabilizers[i], &self.stabilizers[j]);
                if !stabilizers_commute(a, b) {
                    report
                        .noncommuting_pairs
                        .push((a.label.clone(), b.label.clone()));
                }
            }
        }
        report
    }

    /// Density(C) = 2 * sum wt(s) / (|Stabs| + |Data|).
    pub fn density_ratio(&self) -> (usize, usize) {
        let total_weight: usize = self.stabilizers.iter().map(|s| s.weight()).sum();
        (2 * total_weight, self.stabilizers.len() + self.num_data)
    }

    pub fn density(&self) -> f64 {
        let (num, den) = self.density_ratio();
        num as f64 / den as f64
    }

    /// All data qubits appearing in any stabilizer, ascending.
    pub fn support_union(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.stabilizers.iter().flat_map(|s| s.qubits()).collect();
        set.into_iter().collect()
    }

    /// Weighted interaction graph over stabilizers: edge weight is the number
    /// of shared data qubits; zero-weight pairs are omitted.
    pub fn interaction_graph(&self) -> BTreeMap<(usize, usize), usize> {
        let supports: Vec<BTreeSet<usize>> = self
            .stabilizers
            .iter()
            .map(|s| s.qubits().collect())
            .collect();
        let mut graph = BTreeMap::new();
        for i in 0..supports.len() {
            for j in i + 1..supports.len() {
                let shared = supports[i].intersection(&supports[j]).count();
                if shared > 0 {
                    graph.insert((i, j), shared);
                }
            }
        }
        graph
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CodeFile::from(self)).expect("code serialization")
    }

    pub fn from_json(text: &str) -> Result<StabilizerCode> {
        let file: CodeFile = serde_json::from_str(text)?;
        file.into_code()
    }

    pub fn read_file(path: &Path) -> Result<StabilizerCode> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

/// On-disk JSON schema for codes.
#[derive(Debug, Serialize, Deserialize)]
struct CodeFile {
    name: String,
    num_data: usize,
    stabilizers: Vec<CodeFileStabilizer>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CodeFileStabilizer {
    label: String,
    paulis: Vec<(usize, PauliOp)>,
}

impl From<&StabilizerCode> for CodeFile {
    fn from(code: &StabilizerCode) -> CodeFile {
        CodeFile {
            name: code.name.clone(),
            num_data: code.num_data,
            stabilizers: code
                .stabilizers
                .iter()
                .map(|s| CodeFileStabilizer {
                    label: s.label.clone(),
                    paulis: s.paulis.clone(),
                })
                .collect(),
        }
    }
}

impl CodeFile {
    fn into_code(self) -> Result<StabilizerCode> {
        let stabilizers = self
            .stabilizers
            .into_iter()
            .map(|s| Stabilizer::new(s.label, s.paulis))
            .collect::<Result<Vec<_>>>()?;
        Ok(StabilizerCode::new(self.name, self.num_data, stabilizers))
    }
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// Binary matrix over GF(2), used by the hypergraph-product generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMatrix {
    pub rows: Vec<Vec<u8>>,
}

impl BinaryMatrix {
    pub fn new(rows: Vec<Vec<u8>>) -> Result<BinaryMatrix> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(param("empty parity-check matrix"));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(param("ragged parity-check matrix"));
        }
        if rows.iter().flatten().any(|&b| b > 1) {
            return Err(param("parity-check entries must be 0/1"));
        }
        Ok(BinaryMatrix { rows })
    }

    /// Parses lines of 0/1 digits, whitespace optional.
    pub fn parse(text: &str) -> Result<BinaryMatrix> {
        let rows: Vec<Vec<u8>> = text
            .lines()
            .map(|l| l.trim())
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                l.chars()
                    .filter(|c| !c.is_whitespace())
                    .map(|c| match c {
                        '0' => Ok(0u8),
                        '1' => Ok(1u8),
                        _ => Err(param(format!("bad matrix character '{c}'"))),
                    })
                    .collect::<Result<Vec<u8>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        BinaryMatrix::new(rows)
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.rows[0].len()
    }
}

/// Code family selector for the built-in generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeSpecifier {
    /// Rotated surface code of odd distance d >= 3.
    Surface { distance: usize },
    Steane,
    /// Z-type repetition code on n >= 2 qubits.
    Repetition { n: usize },
    /// The [[8,3,2]] cube code: one weight-8 X stabilizer plus four Z faces.
    Cube,
    /// Hypergraph product of two binary parity-check matrices.
    Hgp { h1: BinaryMatrix, h2: BinaryMatrix },
}

pub fn generate_code(spec: &CodeSpecifier) -> Result<StabilizerCode> {
    let code = match spec {
        CodeSpecifier::Surface { distance } => surface_code(*distance)?,
        CodeSpecifier::Steane => steane_code(),
        CodeSpecifier::Repetition { n } => repetition_code(*n)?,
        CodeSpecifier::Cube => cube_code(),
        CodeSpecifier::Hgp { h1, h2 } => hgp_code(h1, h2)?,
    };
    debug_assert!(code.validate().is_valid(), "generated code must validate");
    Ok(code)
}

/// Rotated surface code: d^2 data qubits, d^2 - 1 stabilizers.
///
/// Data qubit (r, c) has index r*d + c. Plaquettes sit on the dual grid;
/// interior plaquettes alternate X/Z in a checkerboard, boundary halves keep
/// X on the top/bottom edges and Z on the left/right edges.
pub fn surface_code(d: usize) -> Result<StabilizerCode> {
    if d < 3 || d % 2 == 0 {
        return Err(param(format!("surface distance must be odd >= 3, got {d}")));
    }
    let mut stabilizers = Vec::new();
    for i in 0..=d {
        for j in 0..=d {
            let mut support = Vec::new();
            for (r, c) in [
                (i.wrapping_sub(1), j.wrapping_sub(1)),
                (i.wrapping_sub(1), j),
                (i, j.wrapping_sub(1)),
                (i, j),
            ] {
                if r < d && c < d {
                    support.push(r * d + c);
                }
            }
            let x_type = (i + j) % 2 == 0;
            let keep = match support.len() {
                4 => true,
                2 => {
                    let horizontal_boundary = i == 0 || i == d;
                    if horizontal_boundary {
                        x_type
                    } else {
                        !x_type
                    }
                }
                _ => false,
            };
            if !keep {
                continue;
            }
            let pauli = if x_type { PauliOp::X } else { PauliOp::Z };
            let label = format!("{}({},{})", if x_type { "X" } else { "Z" }, i, j);
            let paulis = support.into_iter().map(|q| (q, pauli)).collect();
            stabilizers.push(Stabilizer::new(label, paulis)?);
        }
    }
    Ok(StabilizerCode::new(
        format!("surface-{d}"),
        d * d,
        stabilizers,
    ))
}

/// The [[7,1,3]] Steane code: three weight-4 X stabilizers and their Z
/// analogues.
pub fn steane_code() -> StabilizerCode {
    let supports = [vec![0, 1, 2, 3], vec![1, 3, 4, 5], vec![2, 3, 5, 6]];
    let mut stabilizers = Vec::new();
    for (i, support) in supports.iter().enumerate() {
        let paulis = support.iter().map(|&q| (q, PauliOp::X)).collect();
        stabilizers.push(Stabilizer::new(format!("X{}", i + 1), paulis).unwrap());
    }
    for (i, support) in supports.iter().enumerate() {
        let paulis = support.iter().map(|&q| (q, PauliOp::Z)).collect();
        stabilizers.push(Stabilizer::new(format!("Z{}", i + 1), paulis).unwrap());
    }
    StabilizerCode::new("steane", 7, stabilizers)
}

/// Z-type repetition code: Z_i Z_{i+1} for adjacent qubits.
pub fn repetition_code(n: usize) -> Result<StabilizerCode> {
    if n < 2 {
        return Err(param(format!("repetition length must be >= 2, got {n}")));
    }
    let stabilizers = (0..n - 1)
        .map(|i| {
            Stabilizer::new(
                format!("Z{}", i + 1),
                vec![(i, PauliOp::Z), (i + 1, PauliOp::Z)],
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StabilizerCode::new(
        format!("repetition-{n}"),
        n,
        stabilizers,
    ))
}

/// The [[8,3,2]] cube code. Qubits are cube vertices with coordinates
/// (x, y, z) -> index 4z + 2y + x; stabilizers are the all-X operator and
/// four independent Z faces.
pub fn cube_code() -> StabilizerCode {
    let mut stabilizers =
        vec![Stabilizer::new("X", (0..8).map(|q| (q, PauliOp::X)).collect()).unwrap()];
    let faces: [(&str, [usize; 4]); 4] = [
        ("Z1", [0, 1, 2, 3]), // z = 0
        ("Z2", [4, 5, 6, 7]), // z = 1
        ("Z3", [0, 1, 4, 5]), // y = 0
        ("Z4", [0, 2, 4, 6]), // x = 0
    ];
    for (label, face) in faces {
        stabilizers
            .push(Stabilizer::new(label, face.iter().map(|&q| (q, PauliOp::Z)).collect()).unwrap());
    }
    StabilizerCode::new("cube-832", 8, stabilizers)
}

/// Hypergraph product of two classical parity-check matrices.
///
/// With H1 (r1 x n1) and H2 (r2 x n2), qubits split into an n1*n2 "primal"
/// block and an r1*r2 "dual" block:
///   X checks: rows of [H1 (x) I | I (x) H2^T]
///   Z checks: rows of [I (x) H2 | H1^T (x) I]
pub fn hgp_code(h1: &BinaryMatrix, h2: &BinaryMatrix) -> Result<StabilizerCode> {
    let (r1, n1) = (h1.num_rows(), h1.num_cols());
    let (r2, n2) = (h2.num_rows(), h2.num_cols());
    let left = |i: usize, j: usize| i * n2 + j;
    let right = |a: usize, b: usize| n1 * n2 + a * r2 + b;
    let mut stabilizers = Vec::new();
    for a in 0..r1 {
        for j in 0..n2 {
            let mut paulis = Vec::new();
            for i in 0..n1 {
                if h1.rows[a][i] == 1 {
                    paulis.push((left(i, j), PauliOp::X));
                }
            }
            for b in 0..r2 {
                if h2.rows[b][j] == 1 {
                    paulis.push((right(a, b), PauliOp::X));
                }
            }
            if paulis.is_empty() {
                return Err(param(format!("zero row {a} in H1 yields empty X check")));
            }
            stabilizers.push(Stabilizer::new(format!("X({a},{j})"), paulis)?);
        }
    }
    for i in 0..n1 {
        for b in 0..r2 {
            let mut paulis = Vec::new();
            for j in 0..n2 {
                if h2.rows[b][j] == 1 {
                    paulis.push((left(i, j), PauliOp::Z));
                }
            }
            for a in 0..r1 {
                if h1.rows[a][i] == 1 {
                    paulis.push((right(a, b), PauliOp::Z));
                }
            }
            if paulis.is_empty() {
                return Err(param(format!("zero row {b} in H2 yields empty Z check")));
            }
            stabilizers.push(Stabilizer::new(format!("Z({i},{b})"), paulis)?);
        }
    }
    Ok(StabilizerCode::new(
        format!("hgp-{n1}x{n2}"),
        n1 * n2 + r1 * r2,
        stabilizers,
    ))
}
