//! Minimal dense reverse-mode differentiation over 2-D `f64` tensors.
//!
//! Define-by-run: every op evaluates eagerly and records its inputs, so a
//! scalar result can be backpropagated with [`Tensor::backward`]. Gradients
//! accumulate into per-tensor buffers; each backward pass re-derives the
//! gradient from scratch and adds it in, so two passes without zeroing
//! double every gradient.

use std::cell::{Ref, RefCell};
use std::collections::{HashMap, HashSet};
use std::rc::Rc;
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

#[derive(Debug, Error)]
#[error("shape error: {0}")]
pub struct ShapeError(pub String);

/// Row norms below this are clamped in [`Tensor::row_l2_normalize`].
pub const NORMALIZE_EPS: f64 = 1e-12;

static NEXT_ID: AtomicU64 = AtomicU64::new(0);

#[derive(Clone)]
enum Op {
    Leaf,
    MatMul(Tensor, Tensor),
    Add(Tensor, Tensor),
    ScalarMul(Tensor, f64),
    Relu(Tensor),
    Transpose(Tensor),
    RowL2Normalize(Tensor),
    Sigmoid(Tensor),
    Log(Tensor),
    ElemMul(Tensor, Tensor),
    ReduceMean(Tensor),
    SegmentMean(Tensor, Rc<Vec<usize>>, usize),
    SoftmaxCrossEntropy(Tensor, Rc<Vec<usize>>),
}

struct Node {
    id: u64,
    rows: usize,
    cols: usize,
    values: RefCell<Vec<f64>>,
    grad: RefCell<Vec<f64>>,
    needs_grad: bool,
    op: Op,
}

/// Dense matrix participating in a reverse-mode computation graph.
#[derive(Clone)]
pub struct Tensor {
    node: Rc<Node>,
}

fn mat_mul(a: &[f64], ar: usize, ac: usize, b: &[f64], bc: usize) -> Vec<f64> {
    let mut out = vec![0.0; ar * bc];
    for i in 0..ar {
        for k in 0..ac {
            let av = a[i * ac + k];
            if av == 0.0 {
                continue;
            }
            let brow = &b[k * bc..(k + 1) * bc];
            let orow = &mut out[i * bc..(i + 1) * bc];
            for (o, &bv) in orow.iter_mut().zip(brow) {
                *o += av * bv;
            }
        }
    }
    out
}

// a (ar x ac) times b^T where b is (bc x ac); result ar x bc
fn mat_mul_nt(a: &[f64], ar: usize, ac: usize, b: &[f64], bc: usize) -> Vec<f64> {
    let mut out = vec![0.0; ar * bc];
    for i in 0..ar {
        for j in 0..bc {
            let mut s = 0.0;
            for k in 0..ac {
                s += a[i * ac + k] * b[j * ac + k];
            }
            out[i * bc + j] = s;
        }
    }
    out
}

// a^T times b where a is (ar x ac), b is (ar x bc); result ac x bc
fn mat_mul_tn(a: &[f64], ar: usize, ac: usize, b: &[f64], bc: usize) -> Vec<f64> {
    let mut out = vec![0.0; ac * bc];
    for k in 0..ar {
        for i in 0..ac {
            let av = a[k * ac + i];
            if av == 0.0 {
                continue;
            }
            let brow = &b[k * bc..(k + 1) * bc];
            let orow = &mut out[i * bc..(i + 1) * bc];
            for (o, &bv) in orow.iter_mut().zip(brow) {
                *o += av * bv;
            }
        }
    }
    out
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl Tensor {
    fn make(rows: usize, cols: usize, values: Vec<f64>, needs_grad: bool, op: Op) -> Self {
        assert_eq!(values.len(), rows * cols, "value buffer shape mismatch");
        Tensor {
            node: Rc::new(Node {
                id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
                rows,
                cols,
                grad: RefCell::new(vec![0.0; values.len()]),
                values: RefCell::new(values),
                needs_grad,
                op,
            }),
        }
    }

    /// Constant input: no gradient is tracked through it.
    pub fn constant(rows: usize, cols: usize, values: Vec<f64>) -> Self {
        Self::make(rows, cols, values, false, Op::Leaf)
    }

    /// Trainable leaf: gradients accumulate in its buffer.
    pub fn parameter(rows: usize, cols: usize, values: Vec<f64>) -> Self {
        Self::make(rows, cols, values, true, Op::Leaf)
    }

    pub fn scalar(v: f64) -> Self {
        Self::constant(1, 1, vec![v])
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::constant(rows, cols, vec![0.0; rows * cols])
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        Self::constant(rows, cols, vec![1.0; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.node.rows
    }

    pub fn cols(&self) -> usize {
        self.node.cols
    }

    pub fn requires_grad(&self) -> bool {
        self.node.needs_grad
    }

    pub fn values(&self) -> Ref<'_, Vec<f64>> {
        self.node.values.borrow()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.node.values.borrow().clone()
    }

    /// Replaces the stored values (leaves only make sense here; ops derived
    /// from this tensor are not recomputed).
    pub fn set_values(&self, values: Vec<f64>) {
        assert_eq!(values.len(), self.rows() * self.cols());
        *self.node.values.borrow_mut() = values;
    }

    pub fn set_value_at(&self, index: usize, v: f64) {
        self.node.values.borrow_mut()[index] = v;
    }

    pub fn grad(&self) -> Vec<f64> {
        self.node.grad.borrow().clone()
    }

    pub fn zero_grad(&self) {
        for g in self.node.grad.borrow_mut().iter_mut() {
            *g = 0.0;
        }
    }

    /// In-place gradient-descent step `w -= lr * grad`.
    pub fn sgd_step(&self, lr: f64) {
        let g = self.node.grad.borrow();
        let mut v = self.node.values.borrow_mut();
        for (w, gi) in v.iter_mut().zip(g.iter()) {
            *w -= lr * gi;
        }
    }

    /// Value of a 1x1 tensor.
    pub fn item(&self) -> f64 {
        assert_eq!(self.rows() * self.cols(), 1, "item() needs a scalar tensor");
        self.node.values.borrow()[0]
    }

    fn same_shape(&self, other: &Tensor, what: &str) -> Result<(), ShapeError> {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return Err(ShapeError(format!(
                "{what}: ({}, {}) vs ({}, {})",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Tensor) -> Result<Tensor, ShapeError> {
        if self.cols() != other.rows() {
            return Err(ShapeError(format!(
                "matmul: ({}, {}) x ({}, {})",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        let out = mat_mul(
            &self.values(),
            self.rows(),
            self.cols(),
            &other.values(),
            other.cols(),
        );
        Ok(Tensor::make(
            self.rows(),
            other.cols(),
            out,
            self.node.needs_grad || other.node.needs_grad,
            Op::MatMul(self.clone(), other.clone()),
        ))
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor, ShapeError> {
        self.same_shape(other, "add")?;
        let out: Vec<f64> = self
            .values()
            .iter()
            .zip(other.values().iter())
            .map(|(a, b)| a + b)
            .collect();
        Ok(Tensor::make(
            self.rows(),
            self.cols(),
            out,
            self.node.needs_grad || other.node.needs_grad,
            Op::Add(self.clone(), other.clone()),
        ))
    }

    pub fn scalar_mul(&self, c: f64) -> Tensor {
        let out: Vec<f64> = self.values().iter().map(|v| v * c).collect();
        Tensor::make(
            self.rows(),
            self.cols(),
            out,
            self.node.needs_grad,
            Op::ScalarMul(self.clone(), c),
        )
    }

    pub fn relu(&self) -> Tensor {
        let out: Vec<f64> = self.values().iter().map(|&v| v.max(0.0)).collect();
        Tensor::make(
            self.rows(),
            self.cols(),
            out,
            self.node.needs_grad,
            Op::Relu(self.clone()),
        )
    }

    pub fn transpose(&self) -> Tensor {
        let (r, c) = (self.rows(), self.cols());
        let v = self.values();
        let mut out = vec![0.0; r * c];
        for i in 0..r {
            for j in 0..c {
                out[j * r + i] = v[i * c + j];
            }
        }
        drop(v);
        Tensor::make(c, r, out, self.node.needs_grad, Op::Transpose(self.clone()))
    }

    /// Divides each row by `max(||row||_2, 1e-12)`.
    pub fn row_l2_normalize(&self) -> Tensor {
        let (r, c) = (self.rows(), self.cols());
        let v = self.values();
        let mut out = vec![0.0; r * c];
        for i in 0..r {
            let row = &v[i * c..(i + 1) * c];
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            let denom = norm.max(NORMALIZE_EPS);
            for j in 0..c {
                out[i * c + j] = row[j] / denom;
            }
        }
        drop(v);
        Tensor::make(
            r,
            c,
            out,
            self.node.needs_grad,
            Op::RowL2Normalize(self.clone()),
        )
    }

    pub fn sigmoid(&self) -> Tensor {
        let out: Vec<f64> = self.values().iter().map(|&v| sigmoid(v)).collect();
        Tensor::make(
            self.rows(),
            self.cols(),
            out,
            self.node.needs_grad,
            Op::Sigmoid(self.clone()),
        )
    }

    pub fn log(&self) -> Tensor {
        let out: Vec<f64> = self.values().iter().map(|&v| v.ln()).collect();
        Tensor::make(
            self.rows(),
            self.cols(),
            out,
            self.node.needs_grad,
            Op::Log(self.clone()),
        )
    }

    pub fn elementwise_mul(&self, other: &Tensor) -> Result<Tensor, ShapeError> {
        self.same_shape(other, "elementwise_mul")?;
        let out: Vec<f64> = self
            .values()
            .iter()
            .zip(other.values().iter())
            .map(|(a, b)| a * b)
            .collect();
        Ok(Tensor::make(
            self.rows(),
            self.cols(),
            out,
            self.node.needs_grad || other.node.needs_grad,
            Op::ElemMul(self.clone(), other.clone()),
        ))
    }

    /// Mean over all entries, as a 1x1 tensor.
    pub fn reduce_mean(&self) -> Tensor {
        let n = (self.rows() * self.cols()) as f64;
        let s: f64 = self.values().iter().sum();
        Tensor::make(1, 1, vec![s / n], self.node.needs_grad, Op::ReduceMean(self.clone()))
    }

    /// Per-group mean of rows. `groups[r]` is the group of row `r`; ids must
    /// be sorted ascending and cover `0..=max` with no gaps.
    pub fn segment_mean(&self, groups: &[usize]) -> Result<Tensor, ShapeError> {
        if groups.len() != self.rows() {
            return Err(ShapeError(format!(
                "segment_mean: {} group ids for {} rows",
                groups.len(),
                self.rows()
            )));
        }
        if groups.windows(2).any(|w| w[0] > w[1]) {
            return Err(ShapeError("segment_mean: group ids must be sorted".into()));
        }
        let n_groups = groups.last().map_or(0, |&g| g + 1);
        if groups.first() != Some(&0)
            || groups.windows(2).any(|w| w[1] > w[0] + 1)
        {
            return Err(ShapeError(
                "segment_mean: group ids must cover 0..=max contiguously".into(),
            ));
        }
        let c = self.cols();
        let mut counts = vec![0usize; n_groups];
        for &g in groups {
            counts[g] += 1;
        }
        let v = self.values();
        let mut out = vec![0.0; n_groups * c];
        for (r, &g) in groups.iter().enumerate() {
            for j in 0..c {
                out[g * c + j] += v[r * c + j];
            }
        }
        for g in 0..n_groups {
            for j in 0..c {
                out[g * c + j] /= counts[g] as f64;
            }
        }
        drop(v);
        Ok(Tensor::make(
            n_groups,
            c,
            out,
            self.node.needs_grad,
            Op::SegmentMean(self.clone(), Rc::new(groups.to_vec()), n_groups),
        ))
    }

    /// Mean softmax cross-entropy of row logits against integer labels.
    pub fn softmax_cross_entropy(&self, labels: &[usize]) -> Result<Tensor, ShapeError> {
        if labels.len() != self.rows() {
            return Err(ShapeError(format!(
                "softmax_cross_entropy: {} labels for {} rows",
                labels.len(),
                self.rows()
            )));
        }
        let c = self.cols();
        if let Some(&bad) = labels.iter().find(|&&l| l >= c) {
            return Err(ShapeError(format!(
                "softmax_cross_entropy: label {bad} out of range for {c} classes"
            )));
        }
        let v = self.values();
        let mut total = 0.0;
        for (r, &label) in labels.iter().enumerate() {
            let row = &v[r * c..(r + 1) * c];
            let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = row.iter().map(|&x| (x - max).exp()).sum::<f64>().ln() + max;
            total += lse - row[label];
        }
        drop(v);
        let mean = total / labels.len() as f64;
        Ok(Tensor::make(
            1,
            1,
            vec![mean],
            self.node.needs_grad,
            Op::SoftmaxCrossEntropy(self.clone(), Rc::new(labels.to_vec())),
        ))
    }

    fn op_inputs(&self) -> Vec<&Tensor> {
        match &self.node.op {
            Op::Leaf => vec![],
            Op::MatMul(a, b) | Op::Add(a, b) | Op::ElemMul(a, b) => vec![a, b],
            Op::ScalarMul(a, _)
            | Op::Relu(a)
            | Op::Transpose(a)
            | Op::RowL2Normalize(a)
            | Op::Sigmoid(a)
            | Op::Log(a)
            | Op::ReduceMean(a)
            | Op::SegmentMean(a, _, _)
            | Op::SoftmaxCrossEntropy(a, _) => vec![a],
        }
    }

    /// Backpropagates from a scalar tensor, adding `dself/dt` into every
    /// reachable tensor's gradient buffer.
    pub fn backward(&self) -> Result<(), ShapeError> {
        if self.rows() * self.cols() != 1 {
            return Err(ShapeError(format!(
                "backward needs a scalar, got ({}, {})",
                self.rows(),
                self.cols()
            )));
        }
        // Topological order over grad-requiring nodes (post-order DFS).
        let mut order: Vec<Tensor> = Vec::new();
        let mut visited: HashSet<u64> = HashSet::new();
        let mut stack: Vec<(Tensor, bool)> = vec![(self.clone(), false)];
        while let Some((t, expanded)) = stack.pop() {
            if expanded {
                order.push(t);
                continue;
            }
            if !visited.insert(t.node.id) {
                continue;
            }
            let children: Vec<Tensor> = t
                .op_inputs()
                .into_iter()
                .filter(|c| c.node.needs_grad)
                .cloned()
                .collect();
            stack.push((t, true));
            for c in children {
                stack.push((c, false));
            }
        }

        let mut ws: HashMap<u64, Vec<f64>> = HashMap::new();
        ws.insert(self.node.id, vec![1.0]);

        for t in order.iter().rev() {
            let g = match ws.get(&t.node.id) {
                Some(g) => g.clone(),
                None => continue,
            };
            let mut push = |input: &Tensor, contribution: Vec<f64>| {
                if !input.node.needs_grad {
                    return;
                }
                let buf = ws
                    .entry(input.node.id)
                    .or_insert_with(|| vec![0.0; input.rows() * input.cols()]);
                for (b, c) in buf.iter_mut().zip(contribution) {
                    *b += c;
                }
            };
            match &t.node.op {
                Op::Leaf => {}
                Op::MatMul(a, b) => {
                    let (ar, ac, bc) = (a.rows(), a.cols(), b.cols());
                    if a.node.needs_grad {
                        push(a, mat_mul_nt(&g, ar, bc, &b.values(), ac));
                    }
                    if b.node.needs_grad {
                        push(b, mat_mul_tn(&a.values(), ar, ac, &g, bc));
                    }
                }
                Op::Add(a, b) => {
                    push(a, g.clone());
                    push(b, g.clone());
                }
                Op::ScalarMul(a, c) => {
                    push(a, g.iter().map(|x| x * c).collect());
                }
                Op::Relu(a) => {
                    let av = a.values();
                    push(
                        a,
                        g.iter()
                            .zip(av.iter())
                            .map(|(&gi, &x)| if x > 0.0 { gi } else { 0.0 })
                            .collect(),
                    );
                }
                Op::Transpose(a) => {
                    let (r, c) = (t.rows(), t.cols());
                    let mut out = vec![0.0; r * c];
                    for i in 0..r {
                        for j in 0..c {
                            out[j * r + i] = g[i * c + j];
                        }
                    }
                    push(a, out);
                }
                Op::RowL2Normalize(a) => {
                    let (r, c) = (a.rows(), a.cols());
                    let av = a.values();
                    let yv = t.values();
                    let mut out = vec![0.0; r * c];
                    for i in 0..r {
                        let xr = &av[i * c..(i + 1) * c];
                        let yr = &yv[i * c..(i + 1) * c];
                        let gr = &g[i * c..(i + 1) * c];
                        let norm = xr.iter().map(|x| x * x).sum::<f64>().sqrt();
                        if norm > NORMALIZE_EPS {
                            let gy: f64 = gr.iter().zip(yr).map(|(gi, yi)| gi * yi).sum();
                            for j in 0..c {
                                out[i * c + j] = (gr[j] - gy * yr[j]) / norm;
                            }
                        } else {
                            for j in 0..c {
                                out[i * c + j] = gr[j] / NORMALIZE_EPS;
                            }
                        }
                    }
                    drop(av);
                    drop(yv);
                    push(a, out);
                }
                Op::Sigmoid(a) => {
                    let yv = t.values();
                    push(
                        a,
                        g.iter()
                            .zip(yv.iter())
                            .map(|(&gi, &y)| gi * y * (1.0 - y))
                            .collect(),
                    );
                }
                Op::Log(a) => {
                    let av = a.values();
                    push(
                        a,
                        g.iter().zip(av.iter()).map(|(&gi, &x)| gi / x).collect(),
                    );
                }
                Op::ElemMul(a, b) => {
                    if a.node.needs_grad {
                        let bv = b.values();
                        push(
                            a,
                            g.iter().zip(bv.iter()).map(|(&gi, &x)| gi * x).collect(),
                        );
                    }
                    if b.node.needs_grad {
                        let av = a.values();
                        push(
                            b,
                            g.iter().zip(av.iter()).map(|(&gi, &x)| gi * x).collect(),
                        );
                    }
                }
                Op::ReduceMean(a) => {
                    let n = (a.rows() * a.cols()) as f64;
                    push(a, vec![g[0] / n; a.rows() * a.cols()]);
                }
                Op::SegmentMean(a, groups, n_groups) => {
                    let c = a.cols();
                    let mut counts = vec![0usize; *n_groups];
                    for &grp in groups.iter() {
                        counts[grp] += 1;
                    }
                    let mut out = vec![0.0; a.rows() * c];
                    for (r, &grp) in groups.iter().enumerate() {
                        let scale = 1.0 / counts[grp] as f64;
                        for j in 0..c {
                            out[r * c + j] = g[grp * c + j] * scale;
                        }
                    }
                    push(a, out);
                }
                Op::SoftmaxCrossEntropy(a, labels) => {
                    let (r, c) = (a.rows(), a.cols());
                    let av = a.values();
                    let scale = g[0] / r as f64;
                    let mut out = vec![0.0; r * c];
                    for (row, &label) in labels.iter().enumerate() {
                        let logits = &av[row * c..(row + 1) * c];
                        let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                        let denom: f64 = logits.iter().map(|&x| (x - max).exp()).sum();
                        for j in 0..c {
                            let p = (logits[j] - max).exp() / denom;
                            let y = if j == label { 1.0 } else { 0.0 };
                            out[row * c + j] = scale * (p - y);
                        }
                    }
                    drop(av);
                    push(a, out);
                }
            }
        }

        // Fold the freshly computed pass into the persistent accumulators.
        for t in &order {
            if let Some(g) = ws.get(&t.node.id) {
                let mut buf = t.node.grad.borrow_mut();
                for (b, &gi) in buf.iter_mut().zip(g) {
                    *b += gi;
                }
            }
        }
        Ok(())
    }
}

impl std::fmt::Debug for Tensor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Tensor")
            .field("rows", &self.rows())
            .field("cols", &self.cols())
            .field("requires_grad", &self.node.needs_grad)
            .field("values", &self.node.values.borrow())
            .finish()
    }
}

/// Compares backward gradients of `f` at `x` against central differences.
///
/// Coordinates with `|x_i| < 10 * eps` are skipped (relu-style kinks live
/// there). Returns the maximum relative error
/// `|a - n| / max(|a|, |n|, 1e-8)` over the checked coordinates.
pub fn grad_check<F>(mut f: F, x: &Tensor, eps: f64) -> f64
where
    F: FnMut(&Tensor) -> Tensor,
{
    assert!(
        (1e-7..=1e-3).contains(&eps),
        "grad_check eps must lie in [1e-7, 1e-3]"
    );
    assert!(x.requires_grad(), "grad_check input must require grad");
    x.zero_grad();
    let y = f(x);
    y.backward().expect("grad_check needs a scalar-valued f");
    let analytic = x.grad();

    let base = x.to_vec();
    let mut max_err = 0.0f64;
    for i in 0..base.len() {
        if base[i].abs() < 10.0 * eps {
            continue;
        }
        x.set_value_at(i, base[i] + eps);
        let fp = f(x).item();
        x.set_value_at(i, base[i] - eps);
        let fm = f(x).item();
        x.set_value_at(i, base[i]);
        let numeric = (fp - fm) / (2.0 * eps);
        let denom = analytic[i].abs().max(numeric.abs()).max(1e-8);
        max_err = max_err.max((analytic[i] - numeric).abs() / denom);
    }
    max_err
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relu_forward() {
        let x = Tensor::constant(1, 2, vec![-1.0, 2.0]);
        assert_eq!(x.relu().to_vec(), vec![0.0, 2.0]);
    }

    #[test]
    fn row_l2_normalize_forward() {
        let x = Tensor::constant(1, 2, vec![3.0, 4.0]);
        let y = x.row_l2_normalize();
        assert_eq!(y.to_vec(), vec![0.6, 0.8]);
    }

    #[test]
    fn segment_mean_forward() {
        let x = Tensor::constant(3, 1, vec![2.0, 4.0, 6.0]);
        let y = x.segment_mean(&[0, 0, 1]).unwrap();
        assert_eq!(y.to_vec(), vec![3.0, 6.0]);
    }

    #[test]
    fn segment_mean_rejects_unsorted_or_gapped() {
        let x = Tensor::constant(3, 1, vec![1.0, 2.0, 3.0]);
        assert!(x.segment_mean(&[1, 0, 1]).is_err());
        assert!(x.segment_mean(&[0, 0, 2]).is_err());
    }

    #[test]
    fn reduce_mean_backward() {
        let x = Tensor::parameter(2, 2, vec![1.0, 2.0, 3.0, 4.0]);
        let y = x.reduce_mean();
        y.backward().unwrap();
        assert_eq!(x.grad(), vec![0.25; 4]);
    }

    #[test]
    fn sigmoid_grad_at_zero() {
        let w = Tensor::parameter(1, 1, vec![0.0]);
        let y = w.sigmoid();
        y.backward().unwrap();
        assert!((w.grad()[0] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn backward_twice_doubles() {
        let x = Tensor::parameter(1, 3, vec![1.0, 2.0, 3.0]);
        let y = x.elementwise_mul(&x).unwrap().reduce_mean();
        y.backward().unwrap();
        let g1 = x.grad();
        y.backward().unwrap();
        let g2 = x.grad();
        for (a, b) in g1.iter().zip(g2) {
            assert_eq!(2.0 * a, b);
        }
    }

    #[test]
    fn backward_rejects_non_scalar() {
        let x = Tensor::parameter(1, 2, vec![1.0, 2.0]);
        assert!(x.relu().backward().is_err());
    }

    #[test]
    fn matmul_shapes_checked() {
        let a = Tensor::zeros(2, 3);
        let b = Tensor::zeros(2, 3);
        assert!(a.matmul(&b).is_err());
        assert!(a.matmul(&b.transpose()).is_ok());
    }

    #[test]
    fn grad_check_sum_of_squares() {
        let x = Tensor::parameter(2, 3, vec![0.5, -1.2, 2.0, 0.7, -0.4, 1.1]);
        let err = grad_check(|t| t.elementwise_mul(t).unwrap().reduce_mean(), &x, 1e-5);
        assert!(err < 1e-8, "max relative error {err}");
    }

    #[test]
    fn grad_check_composite_ops() {
        // exercise matmul, transpose, normalize, sigmoid, log together
        let x = Tensor::parameter(3, 2, vec![0.9, -0.3, 0.4, 1.2, -0.8, 0.6]);
        let f = |t: &Tensor| {
            let n = t.row_l2_normalize();
            let sim = n.matmul(&n.transpose()).unwrap();
            let squashed = sim.sigmoid();
            let safe = squashed.scalar_mul(0.5).add(&Tensor::constant(
                3,
                3,
                vec![0.25; 9],
            ))
            .unwrap();
            safe.log().reduce_mean().scalar_mul(-1.0)
        };
        let err = grad_check(f, &x, 1e-5);
        assert!(err < 1e-6, "max relative error {err}");
    }

    #[test]
    fn grad_check_softmax_cross_entropy() {
        let x = Tensor::parameter(2, 3, vec![0.3, -0.7, 1.1, 0.9, 0.2, -0.5]);
        let err = grad_check(|t| t.softmax_cross_entropy(&[2, 0]).unwrap(), &x, 1e-5);
        assert!(err < 1e-7, "max relative error {err}");
    }

    #[test]
    fn segment_mean_backward_matches_fd() {
        let x = Tensor::parameter(4, 2, vec![0.5, 1.5, -0.4, 0.9, 2.0, -1.0, 0.3, 0.8]);
        let err = grad_check(
            |t| {
                t.segment_mean(&[0, 0, 1, 1])
                    .unwrap()
                    .elementwise_mul(&t.segment_mean(&[0, 0, 1, 1]).unwrap())
                    .unwrap()
                    .reduce_mean()
            },
            &x,
            1e-5,
        );
        assert!(err < 1e-7, "max relative error {err}");
    }
}
