use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::TnError;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Index {
    pub label: String,
    pub dim: usize,
}

impl Index {
    pub fn new(label: impl Into<String>, dim: usize) -> Self {
        Index {
            label: label.into(),
            dim,
        }
    }

    pub fn qubit(label: impl Into<String>) -> Self {
        Index::new(label, 2)
    }
}

/// Dense tensor in row-major order: the last index varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    indices: Vec<Index>,
    data: Vec<Complex64>,
}

impl Tensor {
    pub fn new(indices: Vec<Index>, data: Vec<Complex64>) -> Result<Self, TnError> {
        for (i, idx) in indices.iter().enumerate() {
            if idx.dim == 0 {
                return Err(TnError::ZeroDim(idx.label.clone()));
            }
            if indices[..i].iter().any(|o| o.label == idx.label) {
                return Err(TnError::DuplicateIndex(idx.label.clone()));
            }
        }
        let expected: usize = indices.iter().map(|i| i.dim).product();
        if data.len() != expected {
            return Err(TnError::DataLength {
                expected,
                got: data.len(),
            });
        }
        Ok(Tensor { indices, data })
    }

    pub fn scalar(value: Complex64) -> Self {
        Tensor {
            indices: Vec::new(),
            data: vec![value],
        }
    }

    pub fn indices(&self) -> &[Index] {
        &self.indices
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn rank(&self) -> usize {
        self.indices.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.indices.iter().position(|i| i.label == label)
    }

    /// Value of a rank-0 tensor.
    pub fn scalar_value(&self) -> Option<Complex64> {
        (self.rank() == 0).then(|| self.data[0])
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.rank()];
        for i in (0..self.rank().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.indices[i + 1].dim;
        }
        strides
    }

    pub fn get(&self, coords: &[usize]) -> Complex64 {
        assert_eq!(coords.len(), self.rank(), "coordinate rank");
        let offset: usize = coords.iter().zip(self.strides()).map(|(c, s)| c * s).sum();
        self.data[offset]
    }

    /// Reorders axes so that axis `i` of the result is axis `order[i]` of `self`.
    pub fn permute(&self, order: &[usize]) -> Tensor {
        assert_eq!(order.len(), self.rank(), "permutation rank");
        if order.iter().enumerate().all(|(i, &o)| i == o) {
            return self.clone();
        }
        let src_strides = self.strides();
        let dims: Vec<usize> = order.iter().map(|&o| self.indices[o].dim).collect();
        let strides: Vec<usize> = order.iter().map(|&o| src_strides[o]).collect();
        let mut data = Vec::with_capacity(self.data.len());
        let mut coords = vec![0usize; dims.len()];
        let mut offset = 0usize;
        for _ in 0..self.data.len() {
            data.push(self.data[offset]);
            // Odometer increment over the destination layout.
            for ax in (0..dims.len()).rev() {
                coords[ax] += 1;
                offset += strides[ax];
                if coords[ax] < dims[ax] {
                    break;
                }
                offset -= strides[ax] * dims[ax];
                coords[ax] = 0;
            }
        }
        Tensor {
            indices: order.iter().map(|&o| self.indices[o].clone()).collect(),
            data,
        }
    }

    /// Permutes to the given label order.
    pub fn permute_labels(&self, labels: &[&str]) -> Result<Tensor, TnError> {
        if labels.len() != self.rank() {
            return Err(TnError::LabelOrder);
        }
        let order = labels
            .iter()
            .map(|l| self.position(l).ok_or(TnError::LabelOrder))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.permute(&order))
    }

    /// Restricts the axis `label` to the single value `value`, dropping it.
    pub fn fix(&self, label: &str, value: usize) -> Result<Tensor, TnError> {
        let axis = self
            .position(label)
            .ok_or_else(|| TnError::UnknownLabel(label.to_string()))?;
        let dim = self.indices[axis].dim;
        assert!(value < dim, "slice value {value} out of range for {label}");
        let inner: usize = self.indices[axis + 1..].iter().map(|i| i.dim).product();
        let outer = self.data.len() / (dim * inner);
        let mut data = Vec::with_capacity(outer * inner);
        for o in 0..outer {
            let base = o * dim * inner + value * inner;
            data.extend_from_slice(&self.data[base..base + inner]);
        }
        let mut indices = self.indices.clone();
        indices.remove(axis);
        Ok(Tensor { indices, data })
    }

    pub fn max_deviation(&self, other: &Tensor) -> f64 {
        assert_eq!(self.data.len(), other.data.len(), "tensor sizes differ");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Sums over the shared indices of `a` and `b`. The result carries `a`'s
/// remaining indices followed by `b`'s, each in their original order.
pub fn contract_pair(a: &Tensor, b: &Tensor) -> Result<Tensor, TnError> {
    contract_pair_counted(a, b).map(|(t, _)| t)
}

/// [`contract_pair`] that also reports the number of scalar multiply-adds
/// it performed.
pub fn contract_pair_counted(a: &Tensor, b: &Tensor) -> Result<(Tensor, u128), TnError> {
    let mut shared_a = Vec::new();
    let mut shared_b = Vec::new();
    for (i, idx) in a.indices.iter().enumerate() {
        if let Some(j) = b.position(&idx.label) {
            let other = &b.indices[j];
            if other.dim != idx.dim {
                return Err(TnError::DimMismatch {
                    label: idx.label.clone(),
                    left: idx.dim,
                    right: other.dim,
                });
            }
            shared_a.push(i);
            shared_b.push(j);
        }
    }
    let free_a: Vec<usize> = (0..a.rank()).filter(|i| !shared_a.contains(i)).collect();
    let free_b: Vec<usize> = (0..b.rank()).filter(|j| !shared_b.contains(j)).collect();

    let pa: Vec<usize> = free_a.iter().chain(&shared_a).copied().collect();
    let pb: Vec<usize> = shared_b.iter().chain(&free_b).copied().collect();
    let am = a.permute(&pa);
    let bm = b.permute(&pb);

    let rows: usize = free_a.iter().map(|&i| a.indices[i].dim).product();
    let inner: usize = shared_a.iter().map(|&i| a.indices[i].dim).product();
    let cols: usize = free_b.iter().map(|&j| b.indices[j].dim).product();

    let mut data = vec![Complex64::new(0.0, 0.0); rows * cols];
    let mut ops: u128 = 0;
    for r in 0..rows {
        let out = &mut data[r * cols..(r + 1) * cols];
        for k in 0..inner {
            let x = am.data[r * inner + k];
            let brow = &bm.data[k * cols..(k + 1) * cols];
            for (o, y) in out.iter_mut().zip(brow) {
                *o += x * y;
            }
            ops += cols as u128;
        }
    }

    let indices = free_a
        .iter()
        .map(|&i| a.indices[i].clone())
        .chain(free_b.iter().map(|&j| b.indices[j].clone()))
        .collect();
    Ok((Tensor { indices, data }, ops))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn t(labels: &[(&str, usize)], data: Vec<f64>) -> Tensor {
        Tensor::new(
            labels.iter().map(|(l, d)| Index::new(*l, *d)).collect(),
            data.into_iter().map(c).collect(),
        )
        .unwrap()
    }

    #[test]
    fn matrix_product() {
        let a = t(&[("i", 2), ("k", 2)], vec![1.0, 2.0, 3.0, 4.0]);
        let b = t(&[("k", 2), ("j", 2)], vec![5.0, 6.0, 7.0, 8.0]);
        let (r, ops) = contract_pair_counted(&a, &b).unwrap();
        assert_eq!(r.indices()[0].label, "i");
        assert_eq!(r.indices()[1].label, "j");
        assert_eq!(r.data(), &[c(19.0), c(22.0), c(43.0), c(50.0)]);
        assert_eq!(ops, 8);
    }

    #[test]
    fn scalar_scales() {
        let a = t(&[("i", 3)], vec![1.0, -2.0, 0.5]);
        let s = Tensor::scalar(c(2.0));
        let r = contract_pair(&a, &s).unwrap();
        assert_eq!(r.data(), &[c(2.0), c(-4.0), c(1.0)]);
        let r = contract_pair(&s, &a).unwrap();
        assert_eq!(r.rank(), 1);
    }

    #[test]
    fn outer_product_order() {
        let a = t(&[("a", 2)], vec![1.0, 2.0]);
        let b = t(&[("b", 3)], vec![1.0, 10.0, 100.0]);
        let r = contract_pair(&a, &b).unwrap();
        assert_eq!(r.get(&[1, 2]), c(200.0));
    }

    #[test]
    fn dimension_mismatch() {
        let a = t(&[("k", 2)], vec![1.0, 2.0]);
        let b = t(&[("k", 3)], vec![1.0, 2.0, 3.0]);
        assert!(matches!(
            contract_pair(&a, &b),
            Err(TnError::DimMismatch { left: 2, right: 3, .. })
        ));
    }

    #[test]
    fn permute_and_fix() {
        let a = t(&[("x", 2), ("y", 3)], vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        let p = a.permute(&[1, 0]);
        assert_eq!(p.get(&[2, 1]), a.get(&[1, 2]));
        let f = a.fix("x", 1).unwrap();
        assert_eq!(f.data(), &[c(3.0), c(4.0), c(5.0)]);
        let f = a.fix("y", 2).unwrap();
        assert_eq!(f.data(), &[c(2.0), c(5.0)]);
        assert!(a.fix("z", 0).is_err());
    }

    #[test]
    fn constructor_validation() {
        assert!(matches!(
            Tensor::new(vec![Index::qubit("a")], vec![c(1.0)]),
            Err(TnError::DataLength { expected: 2, got: 1 })
        ));
        assert!(matches!(
            Tensor::new(vec![Index::qubit("a"), Index::qubit("a")], vec![c(0.0); 4]),
            Err(TnError::DuplicateIndex(_))
        ));
    }
}
