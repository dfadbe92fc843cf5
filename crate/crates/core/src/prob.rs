//! Exact finite-alphabet probability tables and information measures.
//!
//! Everything downstream (rate regions, the Gaussian sweeps' discrete
//! cross-checks, the coding simulator) evaluates entropies and mutual
//! informations on [`JointPMF`] tables built here. All logarithms are
//! base 2, so every measure is in bits.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance on total probability mass (and on conditional row mass).
pub const MASS_TOL: f64 = 1e-12;

/// Entries below this are treated as exact zeros before taking logs,
/// which removes NaN hazards at simplex boundary points.
pub const ZERO_CUTOFF: f64 = 1e-15;

/// Information values in `[-NEG_INFO_TOL, 0)` are round-off and clamp to 0;
/// anything more negative is a bug and surfaces as an error.
pub const NEG_INFO_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ProbError {
    #[error("unknown axis `{0}`")]
    UnknownAxis(String),
    #[error("duplicate axis name `{0}`")]
    DuplicateAxis(String),
    #[error("axis groups must be pairwise disjoint, `{0}` repeats")]
    OverlappingGroups(String),
    #[error("axis `{0}` must have size >= 1")]
    EmptyAxis(String),
    #[error("table has {got} entries, axes require {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("entry {value} at flat index {index} is negative")]
    NegativeEntry { index: usize, value: f64 },
    #[error("probability mass sums to {0}, expected 1")]
    NotNormalized(f64),
    #[error("conditional row {row} sums to {sum}, expected 1")]
    RowNotNormalized { row: usize, sum: f64 },
    #[error("symbol {symbol} out of range for axis `{axis}` of size {size}")]
    SymbolOutOfRange {
        axis: String,
        symbol: usize,
        size: usize,
    },
    #[error("conditioning event has probability {0}, effectively zero")]
    ZeroProbabilityEvent(f64),
    #[error("information measure evaluated to {0}, beyond round-off tolerance")]
    NegativeInformation(f64),
    #[error("axis size mismatch on `{axis}`: {got} vs {expected}")]
    SizeMismatch {
        axis: String,
        got: usize,
        expected: usize,
    },
}

pub type Result<T> = std::result::Result<T, ProbError>;

/// A named finite alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub size: usize,
}

impl Axis {
    pub fn new(name: impl Into<String>, size: usize) -> Self {
        Axis {
            name: name.into(),
            size,
        }
    }
}

fn check_axes(axes: &[Axis]) -> Result<()> {
    for (i, a) in axes.iter().enumerate() {
        if a.size == 0 {
            return Err(ProbError::EmptyAxis(a.name.clone()));
        }
        if axes[..i].iter().any(|b| b.name == a.name) {
            return Err(ProbError::DuplicateAxis(a.name.clone()));
        }
    }
    Ok(())
}

fn cell_count(axes: &[Axis]) -> usize {
    axes.iter().map(|a| a.size).product()
}

/// Row-major strides, last axis fastest.
fn strides(axes: &[Axis]) -> Vec<usize> {
    let mut s = vec![1usize; axes.len()];
    for i in (0..axes.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * axes[i + 1].size;
    }
    s
}

fn xlog2x(p: f64) -> f64 {
    if p < ZERO_CUTOFF {
        0.0
    } else {
        p * p.log2()
    }
}

fn clamp_information(v: f64) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= -NEG_INFO_TOL {
        Ok(0.0)
    } else {
        Err(ProbError::NegativeInformation(v))
    }
}

#[derive(Serialize, Deserialize)]
struct JointPmfJson {
    axes: Vec<Axis>,
    probs: Vec<f64>,
}

/// Dense joint probability table over named finite alphabets.
///
/// Flat storage is row-major with the last axis fastest:
/// `flat = sum_i symbol_i * stride_i`. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "JointPmfJson", into = "JointPmfJson")]
pub struct JointPMF {
    axes: Vec<Axis>,
    table: Vec<f64>,
}

impl TryFrom<JointPmfJson> for JointPMF {
    type Error = ProbError;
    fn try_from(j: JointPmfJson) -> Result<Self> {
        JointPMF::new(j.axes, j.probs)
    }
}

impl From<JointPMF> for JointPmfJson {
    fn from(p: JointPMF) -> Self {
        JointPmfJson {
            axes: p.axes,
            probs: p.table,
        }
    }
}

impl JointPMF {
    /// Validates nonnegativity, unit mass within [`MASS_TOL`], and axis-name
    /// uniqueness.
    pub fn new(axes: Vec<Axis>, table: Vec<f64>) -> Result<Self> {
        check_axes(&axes)?;
        let expected = cell_count(&axes);
        if table.len() != expected {
            return Err(ProbError::LengthMismatch {
                got: table.len(),
                expected,
            });
        }
        let mut sum = 0.0;
        for (i, &v) in table.iter().enumerate() {
            if v < 0.0 {
                return Err(ProbError::NegativeEntry { index: i, value: v });
            }
            sum += v;
        }
        if (sum - 1.0).abs() > MASS_TOL {
            return Err(ProbError::NotNormalized(sum));
        }
        Ok(JointPMF { axes, table })
    }

    /// Single-axis distribution.
    pub fn from_marginal(name: impl Into<String>, probs: &[f64]) -> Result<Self> {
        JointPMF::new(vec![Axis::new(name, probs.len())], probs.to_vec())
    }

    pub fn uniform(axes: Vec<Axis>) -> Result<Self> {
        check_axes(&axes)?;
        let n = cell_count(&axes);
        JointPMF::new(axes, vec![1.0 / n as f64; n])
    }

    /// Point mass on one joint symbol.
    pub fn point_mass(axes: Vec<Axis>, symbols: &[usize]) -> Result<Self> {
        check_axes(&axes)?;
        let s = strides(&axes);
        if symbols.len() != axes.len() {
            return Err(ProbError::LengthMismatch {
                got: symbols.len(),
                expected: axes.len(),
            });
        }
        let mut flat = 0;
        for ((sym, ax), st) in symbols.iter().zip(&axes).zip(&s) {
            if *sym >= ax.size {
                return Err(ProbError::SymbolOutOfRange {
                    axis: ax.name.clone(),
                    symbol: *sym,
                    size: ax.size,
                });
            }
            flat += sym * st;
        }
        let mut table = vec![0.0; cell_count(&axes)];
        table[flat] = 1.0;
        JointPMF::new(axes, table)
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn total_mass(&self) -> f64 {
        self.table.iter().sum()
    }

    pub fn axis_index(&self, name: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| ProbError::UnknownAxis(name.to_string()))
    }

    pub fn axis(&self, name: &str) -> Result<&Axis> {
        Ok(&self.axes[self.axis_index(name)?])
    }

    /// Probability of one joint symbol, one index per axis in axis order.
    pub fn prob(&self, symbols: &[usize]) -> f64 {
        debug_assert_eq!(symbols.len(), self.axes.len());
        let s = strides(&self.axes);
        let flat: usize = symbols.iter().zip(&s).map(|(sym, st)| sym * st).sum();
        self.table[flat]
    }

    fn group_indices(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(names.len());
        for n in names {
            let i = self.axis_index(n)?;
            if out.contains(&i) {
                return Err(ProbError::DuplicateAxis(n.to_string()));
            }
            out.push(i);
        }
        Ok(out)
    }

    /// Joint distribution of two tables over disjoint axes, as independents.
    pub fn product(&self, other: &JointPMF) -> Result<JointPMF> {
        let mut axes = self.axes.clone();
        for a in &other.axes {
            if axes.iter().any(|b| b.name == a.name) {
                return Err(ProbError::DuplicateAxis(a.name.clone()));
            }
            axes.push(a.clone());
        }
        let mut table = Vec::with_capacity(self.table.len() * other.table.len());
        for &p in &self.table {
            for &q in &other.table {
                table.push(p * q);
            }
        }
        JointPMF::new(axes, table)
    }

    /// Pushes this distribution through a conditional law whose conditioning
    /// axes are `given` (named axes of `self`, in the kernel's from-order).
    /// The kernel's output axes are appended after the existing ones.
    pub fn extend(&self, kernel: &CondPMF, given: &[&str]) -> Result<JointPMF> {
        if given.len() != kernel.from_axes.len() {
            return Err(ProbError::LengthMismatch {
                got: given.len(),
                expected: kernel.from_axes.len(),
            });
        }
        let given_idx = self.group_indices(given)?;
        for (i, &gi) in given_idx.iter().enumerate() {
            if self.axes[gi].size != kernel.from_axes[i].size {
                return Err(ProbError::SizeMismatch {
                    axis: self.axes[gi].name.clone(),
                    got: self.axes[gi].size,
                    expected: kernel.from_axes[i].size,
                });
            }
        }
        let mut axes = self.axes.clone();
        for a in &kernel.to_axes {
            if axes.iter().any(|b| b.name == a.name) {
                return Err(ProbError::DuplicateAxis(a.name.clone()));
            }
            axes.push(a.clone());
        }
        let row_len = kernel.row_len();
        let mut table = vec![0.0; self.table.len() * row_len];
        let from_strides = strides(&kernel.from_axes);
        let mut odo = Odometer::new(&self.axes);
        for (flat, &p) in self.table.iter().enumerate() {
            let symbols = odo.symbols();
            let mut row = 0usize;
            for (k, &gi) in given_idx.iter().enumerate() {
                row += symbols[gi] * from_strides[k];
            }
            let base = flat * row_len;
            if p != 0.0 {
                for (j, &q) in kernel.rows[row * row_len..(row + 1) * row_len]
                    .iter()
                    .enumerate()
                {
                    table[base + j] = p * q;
                }
            }
            odo.step();
        }
        JointPMF::new(axes, table)
    }

    /// Same distribution with axes permuted to `order` (must name every axis).
    pub fn reorder(&self, order: &[&str]) -> Result<JointPMF> {
        let perm = self.group_indices(order)?;
        if perm.len() != self.axes.len() {
            return Err(ProbError::LengthMismatch {
                got: perm.len(),
                expected: self.axes.len(),
            });
        }
        let new_axes: Vec<Axis> = perm.iter().map(|&i| self.axes[i].clone()).collect();
        let new_strides = strides(&new_axes);
        let mut table = vec![0.0; self.table.len()];
        let mut odo = Odometer::new(&self.axes);
        for &p in &self.table {
            let symbols = odo.symbols();
            let mut flat = 0usize;
            for (k, &i) in perm.iter().enumerate() {
                flat += symbols[i] * new_strides[k];
            }
            table[flat] = p;
            odo.step();
        }
        JointPMF::new(new_axes, table)
    }

    /// Marginal over `keep` (result axes in `keep` order).
    pub fn marginalize(&self, keep: &[&str]) -> Result<JointPMF> {
        let keep_idx = self.group_indices(keep)?;
        let new_axes: Vec<Axis> = keep_idx.iter().map(|&i| self.axes[i].clone()).collect();
        let new_strides = strides(&new_axes);
        let mut mult = vec![0usize; self.axes.len()];
        for (k, &i) in keep_idx.iter().enumerate() {
            mult[i] = new_strides[k];
        }
        let mut table = vec![0.0; cell_count(&new_axes)];
        let mut odo = OdometerMapped::new(&self.axes, &mult);
        for &p in &self.table {
            table[odo.mapped()] += p;
            odo.step();
        }
        JointPMF::new(new_axes, table)
    }

    /// Conditions on the event `axis = symbol` and renormalizes; the axis is
    /// removed from the result.
    pub fn condition(&self, axis: &str, symbol: usize) -> Result<JointPMF> {
        let ai = self.axis_index(axis)?;
        if symbol >= self.axes[ai].size {
            return Err(ProbError::SymbolOutOfRange {
                axis: axis.to_string(),
                symbol,
                size: self.axes[ai].size,
            });
        }
        let new_axes: Vec<Axis> = self
            .axes
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != ai)
            .map(|(_, a)| a.clone())
            .collect();
        let new_strides = strides(&new_axes);
        let mut mult = vec![0usize; self.axes.len()];
        let mut k = 0;
        for i in 0..self.axes.len() {
            if i != ai {
                mult[i] = new_strides[k];
                k += 1;
            }
        }
        let mut table = vec![0.0; cell_count(&new_axes)];
        let mut mass = 0.0;
        let mut odo = OdometerMapped::new(&self.axes, &mult);
        for &p in &self.table {
            if odo.symbol(ai) == symbol {
                table[odo.mapped()] += p;
                mass += p;
            }
            odo.step();
        }
        if mass <= MASS_TOL {
            return Err(ProbError::ZeroProbabilityEvent(mass));
        }
        for v in &mut table {
            *v /= mass;
        }
        JointPMF::new(new_axes, table)
    }

    /// Entropies of several axis groups in one pass over the table, bits.
    pub fn entropies(&self, groups: &[&[&str]]) -> Result<Vec<f64>> {
        let mut mults = Vec::with_capacity(groups.len());
        let mut buffers = Vec::with_capacity(groups.len());
        for g in groups {
            let idx = self.group_indices(g)?;
            let g_axes: Vec<Axis> = idx.iter().map(|&i| self.axes[i].clone()).collect();
            let g_strides = strides(&g_axes);
            let mut mult = vec![0usize; self.axes.len()];
            for (k, &i) in idx.iter().enumerate() {
                mult[i] = g_strides[k];
            }
            mults.push(mult);
            buffers.push(vec![0.0f64; cell_count(&g_axes)]);
        }
        let mut odos: Vec<OdometerMapped> = mults
            .iter()
            .map(|m| OdometerMapped::new(&self.axes, m))
            .collect();
        for &p in &self.table {
            for (odo, buf) in odos.iter_mut().zip(buffers.iter_mut()) {
                buf[odo.mapped()] += p;
                odo.step();
            }
        }
        let mut out = Vec::with_capacity(groups.len());
        for buf in buffers {
            let h: f64 = -buf.iter().map(|&p| xlog2x(p)).sum::<f64>();
            out.push(clamp_information(h)?);
        }
        Ok(out)
    }

    /// Marginal entropy H of `vars`, bits.
    pub fn entropy(&self, vars: &[&str]) -> Result<f64> {
        Ok(self.entropies(&[vars])?[0])
    }

    /// I(A;B), bits.
    pub fn mutual_information(&self, a: &[&str], b: &[&str]) -> Result<f64> {
        self.cond_mutual_information(a, b, &[])
    }

    /// I(A;B|C) = H(A,C) + H(B,C) - H(A,B,C) - H(C), bits. The groups must be
    /// pairwise disjoint; C may be empty. Values in `[-1e-10, 0)` clamp to 0.
    pub fn cond_mutual_information(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
        for x in a {
            if b.contains(x) || c.contains(x) {
                return Err(ProbError::OverlappingGroups(x.to_string()));
            }
        }
        for x in b {
            if c.contains(x) {
                return Err(ProbError::OverlappingGroups(x.to_string()));
            }
        }
        let ac: Vec<&str> = a.iter().chain(c.iter()).copied().collect();
        let bc: Vec<&str> = b.iter().chain(c.iter()).copied().collect();
        let abc: Vec<&str> = a.iter().chain(b.iter()).chain(c.iter()).copied().collect();
        let h = self.entropies(&[&ac, &bc, &abc, c])?;
        clamp_information(h[0] + h[1] - h[2] - h[3])
    }

    /// Conditional entropy H(A|C), bits.
    pub fn cond_entropy(&self, a: &[&str], c: &[&str]) -> Result<f64> {
        let ac: Vec<&str> = a.iter().chain(c.iter()).copied().collect();
        let h = self.entropies(&[&ac, c])?;
        clamp_information(h[0] - h[1])
    }

    /// Tests the Markov chain A - B - C, i.e. I(A;C|B) <= tol.
    pub fn is_markov(&self, a: &[&str], b: &[&str], c: &[&str], tol: f64) -> Result<bool> {
        Ok(self.cond_mutual_information(a, c, b)? <= tol)
    }
}

/// Mixed-radix counter over axis symbols, last axis fastest, matching the
/// flat-table iteration order.
struct Odometer {
    sizes: Vec<usize>,
    symbols: Vec<usize>,
}

impl Odometer {
    fn new(axes: &[Axis]) -> Self {
        Odometer {
            sizes: axes.iter().map(|a| a.size).collect(),
            symbols: vec![0; axes.len()],
        }
    }

    fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    fn step(&mut self) {
        for d in (0..self.symbols.len()).rev() {
            self.symbols[d] += 1;
            if self.symbols[d] < self.sizes[d] {
                return;
            }
            self.symbols[d] = 0;
        }
    }
}

/// Odometer that additionally maintains a reduced flat index
/// `sum_i symbol_i * mult_i` incrementally.
struct OdometerMapped {
    sizes: Vec<usize>,
    symbols: Vec<usize>,
    mult: Vec<usize>,
    mapped: usize,
}

impl OdometerMapped {
    fn new(axes: &[Axis], mult: &[usize]) -> Self {
        OdometerMapped {
            sizes: axes.iter().map(|a| a.size).collect(),
            symbols: vec![0; axes.len()],
            mult: mult.to_vec(),
            mapped: 0,
        }
    }

    fn mapped(&self) -> usize {
        self.mapped
    }

    fn symbol(&self, i: usize) -> usize {
        self.symbols[i]
    }

    fn step(&mut self) {
        for d in (0..self.symbols.len()).rev() {
            self.symbols[d] += 1;
            if self.symbols[d] < self.sizes[d] {
                self.mapped += self.mult[d];
                return;
            }
            self.symbols[d] = 0;
            self.mapped -= self.mult[d] * (self.sizes[d] - 1);
        }
    }
}

/// Conditional law: one probability row over the output axes per
/// conditioning tuple. Rows are stored from-major; within a row the output
/// axes follow the same last-axis-fastest convention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondPMF {
    from_axes: Vec<Axis>,
    to_axes: Vec<Axis>,
    rows: Vec<f64>,
}

impl CondPMF {
    pub fn new(from_axes: Vec<Axis>, to_axes: Vec<Axis>, rows: Vec<f64>) -> Result<Self> {
        check_axes(&from_axes)?;
        check_axes(&to_axes)?;
        for a in &to_axes {
            if from_axes.iter().any(|b| b.name == a.name) {
                return Err(ProbError::DuplicateAxis(a.name.clone()));
            }
        }
        let n_rows = cell_count(&from_axes);
        let row_len = cell_count(&to_axes);
        if rows.len() != n_rows * row_len {
            return Err(ProbError::LengthMismatch {
                got: rows.len(),
                expected: n_rows * row_len,
            });
        }
        for r in 0..n_rows {
            let mut sum = 0.0;
            for (j, &v) in rows[r * row_len..(r + 1) * row_len].iter().enumerate() {
                if v < 0.0 {
                    return Err(ProbError::NegativeEntry {
                        index: r * row_len + j,
                        value: v,
                    });
                }
                sum += v;
            }
            if (sum - 1.0).abs() > MASS_TOL {
                return Err(ProbError::RowNotNormalized { row: r, sum });
            }
        }
        Ok(CondPMF {
            from_axes,
            to_axes,
            rows,
        })
    }

    /// Deterministic copy kernel: output equals input.
    pub fn identity(from: Axis, to_name: impl Into<String>) -> Self {
        let n = from.size;
        let mut rows = vec![0.0; n * n];
        for i in 0..n {
            rows[i * n + i] = 1.0;
        }
        CondPMF {
            to_axes: vec![Axis::new(to_name, n)],
            from_axes: vec![from],
            rows,
        }
    }

    /// Kernel with a single conditioning axis, one row per input symbol.
    pub fn from_rows(from: Axis, to: Axis, rows: &[Vec<f64>]) -> Result<Self> {
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        CondPMF::new(vec![from], vec![to], flat)
    }

    pub fn from_axes(&self) -> &[Axis] {
        &self.from_axes
    }

    pub fn to_axes(&self) -> &[Axis] {
        &self.to_axes
    }

    pub fn n_rows(&self) -> usize {
        cell_count(&self.from_axes)
    }

    pub fn row_len(&self) -> usize {
        cell_count(&self.to_axes)
    }

    pub fn row(&self, r: usize) -> &[f64] {
        let w = self.row_len();
        &self.rows[r * w..(r + 1) * w]
    }

    pub fn rows_flat(&self) -> &[f64] {
        &self.rows
    }

    /// Drops output axes not in `keep`, summing them out of every row.
    pub fn marginalize_outputs(&self, keep: &[&str]) -> Result<CondPMF> {
        let mut keep_idx = Vec::with_capacity(keep.len());
        for n in keep {
            let i = self
                .to_axes
                .iter()
                .position(|a| a.name == *n)
                .ok_or_else(|| ProbError::UnknownAxis(n.to_string()))?;
            if keep_idx.contains(&i) {
                return Err(ProbError::DuplicateAxis(n.to_string()));
            }
            keep_idx.push(i);
        }
        let new_to: Vec<Axis> = keep_idx.iter().map(|&i| self.to_axes[i].clone()).collect();
        let new_strides = strides(&new_to);
        let mut mult = vec![0usize; self.to_axes.len()];
        for (k, &i) in keep_idx.iter().enumerate() {
            mult[i] = new_strides[k];
        }
        let new_row_len = cell_count(&new_to);
        let mut rows = vec![0.0; self.n_rows() * new_row_len];
        for r in 0..self.n_rows() {
            let mut odo = OdometerMapped::new(&self.to_axes, &mult);
            for &p in self.row(r) {
                rows[r * new_row_len + odo.mapped()] += p;
                odo.step();
            }
        }
        CondPMF::new(self.from_axes.clone(), new_to, rows)
    }

    /// Renames axes (positional over from-axes then to-axes).
    pub fn with_axis_names(&self, from_names: &[&str], to_names: &[&str]) -> Result<CondPMF> {
        if from_names.len() != self.from_axes.len() || to_names.len() != self.to_axes.len() {
            return Err(ProbError::LengthMismatch {
                got: from_names.len() + to_names.len(),
                expected: self.from_axes.len() + self.to_axes.len(),
            });
        }
        let from_axes = self
            .from_axes
            .iter()
            .zip(from_names)
            .map(|(a, n)| Axis::new(*n, a.size))
            .collect();
        let to_axes = self
            .to_axes
            .iter()
            .zip(to_names)
            .map(|(a, n)| Axis::new(*n, a.size))
            .collect();
        CondPMF::new(from_axes, to_axes, self.rows.clone())
    }
}

/// All vectors with entries in {0, 1/steps, ..., 1} summing to 1, i.e. the
/// resolution-`steps` grid on the (dim-1)-simplex. Yields
/// `C(steps+dim-1, dim-1)` distinct valid PMFs.
pub fn simplex_grid(dim: usize, steps: usize) -> SimplexGrid {
    assert!(dim >= 1, "simplex_grid requires dim >= 1");
    assert!(steps >= 1, "simplex_grid requires steps >= 1");
    let mut counts = vec![0usize; dim];
    counts[0] = steps;
    SimplexGrid {
        counts,
        steps,
        done: false,
    }
}

pub struct SimplexGrid {
    counts: Vec<usize>,
    steps: usize,
    done: bool,
}

impl Iterator for SimplexGrid {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        if self.done {
            return None;
        }
        let out: Vec<f64> = self
            .counts
            .iter()
            .map(|&c| c as f64 / self.steps as f64)
            .collect();
        let dim = self.counts.len();
        if self.counts[dim - 1] == self.steps {
            self.done = true;
        } else {
            // classic next-composition step: move one unit right of the
            // rightmost positive entry before the last slot, gathering the
            // tail mass with it
            let tail = self.counts[dim - 1];
            let i = (0..dim - 1).rfind(|&i| self.counts[i] > 0).unwrap();
            self.counts[i] -= 1;
            self.counts[i + 1] = tail + 1;
            for c in &mut self.counts[i + 2..] {
                *c = 0;
            }
        }
        Some(out)
    }
}

/// Number of points `simplex_grid(dim, steps)` yields.
pub fn simplex_grid_count(dim: usize, steps: usize) -> u128 {
    // C(steps + dim - 1, dim - 1)
    let n = (steps + dim - 1) as u128;
    let k = (dim - 1) as u128;
    let mut out: u128 = 1;
    for i in 0..k {
        out = out * (n - i) / (i + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(name: &str) -> Axis {
        Axis::new(name, 2)
    }

    #[test]
    fn entropy_uniform_and_point_mass() {
        let p = JointPMF::uniform(vec![Axis::new("A", 8)]).unwrap();
        assert!((p.entropy(&["A"]).unwrap() - 3.0).abs() < 1e-12);

        let q = JointPMF::point_mass(vec![Axis::new("A", 8)], &[5]).unwrap();
        assert_eq!(q.entropy(&["A"]).unwrap(), 0.0);
    }

    #[test]
    fn entropy_bernoulli_011() {
        let p = JointPMF::from_marginal("A", &[0.11, 0.89]).unwrap();
        // -0.11 log2 0.11 - 0.89 log2 0.89, evaluated at high precision
        assert!((p.entropy(&["A"]).unwrap() - 0.499_915_958_164_528_0).abs() < 1e-12);
    }

    #[test]
    fn entropy_unknown_axis_errors() {
        let p = JointPMF::uniform(vec![bits("A")]).unwrap();
        assert!(matches!(
            p.entropy(&["B"]),
            Err(ProbError::UnknownAxis(_))
        ));
    }

    #[test]
    fn mi_independent_is_zero() {
        let a = JointPMF::from_marginal("A", &[0.3, 0.7]).unwrap();
        let b = JointPMF::from_marginal("B", &[0.6, 0.4]).unwrap();
        let p = a.product(&b).unwrap();
        assert_eq!(p.mutual_information(&["A"], &["B"]).unwrap(), 0.0);
    }

    #[test]
    fn mi_copy_uniform4_is_two_bits() {
        let a = JointPMF::uniform(vec![Axis::new("A", 4)]).unwrap();
        let p = a
            .extend(&CondPMF::identity(Axis::new("A", 4), "B"), &["A"])
            .unwrap();
        assert!((p.mutual_information(&["A"], &["B"]).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn mi_bsc_011_uniform_input() {
        let x = JointPMF::from_marginal("X", &[0.5, 0.5]).unwrap();
        let bsc = CondPMF::from_rows(
            bits("X"),
            bits("Y"),
            &[vec![0.89, 0.11], vec![0.11, 0.89]],
        )
        .unwrap();
        let p = x.extend(&bsc, &["X"]).unwrap();
        let mi = p.mutual_information(&["X"], &["Y"]).unwrap();
        assert!((mi - 0.500_084_041_835_472_0).abs() < 1e-12);
    }

    #[test]
    fn cmi_overlapping_groups_error() {
        let p = JointPMF::uniform(vec![bits("A"), bits("B")]).unwrap();
        assert!(matches!(
            p.cond_mutual_information(&["A"], &["A"], &[]),
            Err(ProbError::OverlappingGroups(_))
        ));
        assert!(matches!(
            p.cond_mutual_information(&["A"], &["B"], &["B"]),
            Err(ProbError::OverlappingGroups(_))
        ));
    }

    #[test]
    fn marginalize_product_recovers_factor() {
        let a = JointPMF::from_marginal("A", &[0.25, 0.75]).unwrap();
        let b = JointPMF::from_marginal("B", &[0.1, 0.9]).unwrap();
        let p = a.product(&b).unwrap();
        let m = p.marginalize(&["A"]).unwrap();
        for (x, y) in m.table().iter().zip(a.table()) {
            assert!((x - y).abs() < 1e-15);
        }
        assert!((m.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn condition_copy_law_gives_point_mass() {
        let a = JointPMF::from_marginal("A", &[0.5, 0.5]).unwrap();
        let p = a.extend(&CondPMF::identity(bits("A"), "B"), &["A"]).unwrap();
        let c = p.condition("A", 0).unwrap();
        assert_eq!(c.axes().len(), 1);
        assert!((c.table()[0] - 1.0).abs() < 1e-15);
        assert_eq!(c.table()[1], 0.0);
    }

    #[test]
    fn condition_zero_probability_event_errors() {
        let p = JointPMF::new(vec![bits("A"), bits("B")], vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        assert!(matches!(
            p.condition("A", 1),
            Err(ProbError::ZeroProbabilityEvent(_))
        ));
    }

    #[test]
    fn markov_product_and_copy_chains() {
        let p = JointPMF::uniform(vec![bits("A"), bits("B"), bits("C")]).unwrap();
        assert!(p.is_markov(&["A"], &["B"], &["C"], 1e-9).unwrap());

        let a = JointPMF::from_marginal("A", &[0.5, 0.5]).unwrap();
        let chain = a
            .extend(&CondPMF::identity(bits("A"), "B"), &["A"])
            .unwrap()
            .extend(&CondPMF::identity(bits("B"), "C"), &["B"])
            .unwrap();
        assert!(chain.is_markov(&["A"], &["B"], &["C"], 1e-9).unwrap());

        // A = C copies, B independent: I(A;C|B) = H(A) = 1 bit
        let ac = a.extend(&CondPMF::identity(bits("A"), "C"), &["A"]).unwrap();
        let p = ac
            .product(&JointPMF::from_marginal("B", &[0.5, 0.5]).unwrap())
            .unwrap();
        assert!(!p.is_markov(&["A"], &["B"], &["C"], 1e-9).unwrap());
    }

    #[test]
    fn simplex_grid_small_cases() {
        let pts: Vec<Vec<f64>> = simplex_grid(2, 2).collect();
        assert_eq!(pts.len(), 3);
        assert!(pts.contains(&vec![1.0, 0.0]));
        assert!(pts.contains(&vec![0.5, 0.5]));
        assert!(pts.contains(&vec![0.0, 1.0]));

        let pts: Vec<Vec<f64>> = simplex_grid(1, 7).collect();
        assert_eq!(pts, vec![vec![1.0]]);
    }

    #[test]
    fn simplex_grid_count_matches_enumeration() {
        // stars and bars: C(6,2) = 15
        assert_eq!(simplex_grid_count(3, 4), 15);
        let pts: Vec<Vec<f64>> = simplex_grid(3, 4).collect();
        assert_eq!(pts.len(), 15);
        for p in &pts {
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(p.iter().all(|&x| x >= 0.0));
        }
        // pairwise distinct
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                assert_ne!(pts[i], pts[j]);
            }
        }
    }

    #[test]
    fn json_roundtrip_and_flat_layout() {
        let p = JointPMF::new(
            vec![Axis::new("A", 2), Axis::new("B", 3)],
            vec![0.1, 0.2, 0.3, 0.05, 0.15, 0.2],
        )
        .unwrap();
        // last axis fastest: flat = a*3 + b
        assert_eq!(p.prob(&[1, 2]), 0.2);
        assert_eq!(p.prob(&[0, 1]), 0.2);

        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"axes\""));
        assert!(s.contains("\"probs\""));
        let q: JointPMF = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);

        let bad = r#"{"axes":[{"name":"A","size":2}],"probs":[0.5,0.6]}"#;
        assert!(serde_json::from_str::<JointPMF>(bad).is_err());
    }

    #[test]
    fn invalid_tables_rejected() {
        assert!(matches!(
            JointPMF::new(vec![bits("A")], vec![0.5, 0.6]),
            Err(ProbError::NotNormalized(_))
        ));
        assert!(matches!(
            JointPMF::new(vec![bits("A")], vec![1.2, -0.2]),
            Err(ProbError::NegativeEntry { .. })
        ));
        assert!(matches!(
            JointPMF::new(vec![bits("A"), bits("A")], vec![0.25; 4]),
            Err(ProbError::DuplicateAxis(_))
        ));
    }

    #[test]
    fn reorder_preserves_probabilities() {
        let p = JointPMF::new(
            vec![Axis::new("A", 2), Axis::new("B", 3)],
            vec![0.1, 0.2, 0.3, 0.05, 0.15, 0.2],
        )
        .unwrap();
        let q = p.reorder(&["B", "A"]).unwrap();
        for a in 0..2 {
            for b in 0..3 {
                assert_eq!(p.prob(&[a, b]), q.prob(&[b, a]));
            }
        }
    }

    #[test]
    fn cond_pmf_row_validation() {
        assert!(matches!(
            CondPMF::from_rows(bits("X"), bits("Y"), &[vec![0.5, 0.4], vec![0.5, 0.5]]),
            Err(ProbError::RowNotNormalized { row: 0, .. })
        ));
    }

    #[test]
    fn marginalize_outputs_sums_rows() {
        let k = CondPMF::new(
            vec![bits("X")],
            vec![bits("Y"), bits("Z")],
            vec![0.1, 0.2, 0.3, 0.4, 0.25, 0.25, 0.25, 0.25],
        )
        .unwrap();
        let m = k.marginalize_outputs(&["Y"]).unwrap();
        assert!((m.row(0)[0] - 0.3).abs() < 1e-15);
        assert!((m.row(0)[1] - 0.7).abs() < 1e-15);
        assert!((m.row(1)[0] - 0.5).abs() < 1e-15);
    }
}
