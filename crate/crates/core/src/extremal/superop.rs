use crate::algebra::{BlockElement, BlockShape, Functional};
use crate::numkit::{CMatrix, CVector, C64};

use super::ExtremalError;

/// Linear map between block algebras, stored as the images of the matrix
/// units of every input block.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    in_shape: BlockShape,
    out_shape: BlockShape,
    /// `images[b][p * n_b + q] = ψ(e_pq in block b)`
    images: Vec<Vec<BlockElement>>,
}

impl Superoperator {
    pub fn new(
        in_shape: BlockShape,
        out_shape: BlockShape,
        images: Vec<Vec<BlockElement>>,
    ) -> Result<Self, ExtremalError> {
        if images.len() != in_shape.num_blocks() {
            return Err(ExtremalError::InvalidSuperoperator(format!(
                "expected images for {} input blocks, got {}",
                in_shape.num_blocks(),
                images.len()
            )));
        }
        for (b, block_images) in images.iter().enumerate() {
            let n = in_shape.dim(b);
            if block_images.len() != n * n {
                return Err(ExtremalError::InvalidSuperoperator(format!(
                    "input block {b} needs {} matrix-unit images, got {}",
                    n * n,
                    block_images.len()
                )));
            }
            if let Some(bad) = block_images.iter().find(|e| e.shape() != &out_shape) {
                return Err(ExtremalError::InvalidSuperoperator(format!(
                    "image of input block {b} has shape {}, expected {}",
                    bad.shape(),
                    out_shape
                )));
            }
        }
        Ok(Self {
            in_shape,
            out_shape,
            images,
        })
    }

    /// Builds the map from a closure giving `ψ(e_pq)` for input block `b`.
    pub fn from_fn(
        in_shape: BlockShape,
        out_shape: BlockShape,
        mut image: impl FnMut(usize, usize, usize) -> BlockElement,
    ) -> Result<Self, ExtremalError> {
        let images = (0..in_shape.num_blocks())
            .map(|b| {
                let n = in_shape.dim(b);
                (0..n * n).map(|idx| image(b, idx / n, idx % n)).collect()
            })
            .collect();
        Self::new(in_shape, out_shape, images)
    }

    /// Assembles a map whose output block `b` is `parts[b].1` applied to
    /// input block `parts[b].0`.
    pub fn from_block_maps(
        in_shape: BlockShape,
        parts: &[(usize, BlockMap)],
    ) -> Result<Self, ExtremalError> {
        let dims: Vec<usize> = parts.iter().map(|(_, m)| m.h()).collect();
        let out_shape = BlockShape::new(dims).map_err(ExtremalError::Algebra)?;
        for (j, map) in parts {
            if *j >= in_shape.num_blocks() || in_shape.dim(*j) != map.k() {
                return Err(ExtremalError::InvalidSuperoperator(format!(
                    "block map of input size {} does not fit input block {j}",
                    map.k()
                )));
            }
        }
        Self::from_fn(in_shape, out_shape.clone(), |b, p, q| {
            let mut e = BlockElement::zeros(&out_shape);
            for (out, (j, map)) in parts.iter().enumerate() {
                if *j == b {
                    *e.block_mut(out) = map.image(p, q).clone();
                }
            }
            e
        })
    }

    pub fn in_shape(&self) -> &BlockShape {
        &self.in_shape
    }

    pub fn out_shape(&self) -> &BlockShape {
        &self.out_shape
    }

    pub fn image(&self, block: usize, p: usize, q: usize) -> &BlockElement {
        let n = self.in_shape.dim(block);
        &self.images[block][p * n + q]
    }

    pub fn images(&self) -> &[Vec<BlockElement>] {
        &self.images
    }

    pub fn apply(&self, a: &BlockElement) -> Result<BlockElement, ExtremalError> {
        if a.shape() != &self.in_shape {
            return Err(ExtremalError::InvalidSuperoperator(format!(
                "argument shape {} does not match input shape {}",
                a.shape(),
                self.in_shape
            )));
        }
        let mut out: Vec<CMatrix> = self
            .out_shape
            .dims()
            .iter()
            .map(|&h| CMatrix::zeros(h, h))
            .collect();
        for (b, block_images) in self.images.iter().enumerate() {
            let n = self.in_shape.dim(b);
            let ab = a.block(b);
            for (idx, image) in block_images.iter().enumerate() {
                let coeff = ab[(idx / n, idx % n)];
                if coeff == C64::new(0.0, 0.0) {
                    continue;
                }
                for (acc, m) in out.iter_mut().zip(image.blocks()) {
                    *acc += m * coeff;
                }
            }
        }
        Ok(BlockElement::new(self.out_shape.clone(), out)?)
    }

    /// The adjoint `ψ*ρ = ρ ∘ ψ` on functionals.
    pub fn pullback(&self, rho: &Functional) -> Result<Functional, ExtremalError> {
        if rho.shape() != &self.out_shape {
            return Err(ExtremalError::InvalidSuperoperator(format!(
                "functional shape {} does not match output shape {}",
                rho.shape(),
                self.out_shape
            )));
        }
        let reps = self
            .images
            .iter()
            .enumerate()
            .map(|(b, block_images)| {
                let n = self.in_shape.dim(b);
                // tr(S e_pq) = S_qp, so the pulled-back entry (q, p) is ρ(ψ(e_pq)).
                CMatrix::from_fn(n, n, |q, p| {
                    rho.reps()
                        .iter()
                        .zip(block_images[p * n + q].blocks())
                        .map(|(s, m)| trace_product(s, m))
                        .sum()
                })
            })
            .collect();
        Ok(Functional::new(self.in_shape.clone(), reps)?)
    }

    /// `ψ*(u ⊗ v)` for the vector functional `X ↦ ⟨X_out u, v⟩`.
    pub fn pullback_vectors(
        &self,
        out_block: usize,
        u: &CVector,
        v: &CVector,
    ) -> Result<Functional, ExtremalError> {
        let h = self.out_shape.dim(out_block);
        if u.len() != h || v.len() != h {
            return Err(ExtremalError::InvalidSuperoperator(format!(
                "vectors must have length {h} for output block {out_block}"
            )));
        }
        let reps = self
            .images
            .iter()
            .enumerate()
            .map(|(b, block_images)| {
                let n = self.in_shape.dim(b);
                CMatrix::from_fn(n, n, |q, p| {
                    sandwich(v, block_images[p * n + q].block(out_block), u)
                })
            })
            .collect();
        Ok(Functional::new(self.in_shape.clone(), reps)?)
    }

    /// Restriction to one input block and one output block.
    pub fn restrict(&self, in_block: usize, out_block: usize) -> BlockMap {
        let k = self.in_shape.dim(in_block);
        let h = self.out_shape.dim(out_block);
        let images = self.images[in_block]
            .iter()
            .map(|e| e.block(out_block).clone())
            .collect();
        BlockMap { k, h, images }
    }

    /// Input blocks whose images reach `out_block` with norm above `tol`.
    pub fn contributing_blocks(&self, out_block: usize, tol: f64) -> Vec<usize> {
        self.images
            .iter()
            .enumerate()
            .filter(|(_, imgs)| imgs.iter().any(|e| e.block(out_block).norm() > tol))
            .map(|(b, _)| b)
            .collect()
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            in_shape: self.in_shape.clone(),
            out_shape: self.out_shape.clone(),
            images: self
                .images
                .iter()
                .map(|imgs| imgs.iter().map(|e| e.scale(z)).collect())
                .collect(),
        }
    }

    /// Largest Frobenius distance between corresponding matrix-unit images.
    pub fn max_image_distance(&self, other: &Self) -> Result<f64, ExtremalError> {
        if self.in_shape != other.in_shape || self.out_shape != other.out_shape {
            return Err(ExtremalError::InvalidSuperoperator(
                "maps have different shapes".into(),
            ));
        }
        let mut worst: f64 = 0.0;
        for (a, b) in self.images.iter().flatten().zip(other.images.iter().flatten()) {
            worst = worst.max(a.sub(b)?.norm());
        }
        Ok(worst)
    }
}

/// Single-block map `M_k → M_h` given by the images of matrix units.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMap {
    k: usize,
    h: usize,
    images: Vec<CMatrix>,
}

impl BlockMap {
    pub fn new(k: usize, h: usize, images: Vec<CMatrix>) -> Result<Self, ExtremalError> {
        if k == 0 || h == 0 || images.len() != k * k {
            return Err(ExtremalError::InvalidSuperoperator(format!(
                "a map M_{k} -> M_{h} needs {} images, got {}",
                k * k,
                images.len()
            )));
        }
        if images.iter().any(|m| m.nrows() != h || m.ncols() != h) {
            return Err(ExtremalError::InvalidSuperoperator(format!(
                "images must be {h}x{h}"
            )));
        }
        Ok(Self { k, h, images })
    }

    pub fn from_fn(k: usize, h: usize, mut image: impl FnMut(usize, usize) -> CMatrix) -> Self {
        let images = (0..k * k).map(|idx| image(idx / k, idx % k)).collect();
        Self::new(k, h, images).expect("closure produced images of the declared size")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn image(&self, p: usize, q: usize) -> &CMatrix {
        &self.images[p * self.k + q]
    }

    pub fn apply(&self, t: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.h, self.h);
        for (idx, m) in self.images.iter().enumerate() {
            let coeff = t[(idx / self.k, idx % self.k)];
            if coeff != C64::new(0.0, 0.0) {
                out += m * coeff;
            }
        }
        out
    }

    /// Representative `S ∈ M_k` of `T ↦ ⟨ψ(T) u, v⟩`.
    pub fn adjoint_vectors(&self, u: &CVector, v: &CVector) -> CMatrix {
        CMatrix::from_fn(self.k, self.k, |q, p| sandwich(v, self.image(p, q), u))
    }

    /// Representative of `T ↦ ⟨ψ(T) e_i, e_j⟩`: entry `(q, p)` is `ψ(e_pq)_{ji}`.
    pub fn adjoint_unit(&self, i: usize, j: usize) -> CMatrix {
        CMatrix::from_fn(self.k, self.k, |q, p| self.image(p, q)[(j, i)])
    }

    pub fn max_image_distance(&self, other: &Self) -> f64 {
        self.images
            .iter()
            .zip(&other.images)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_superoperator(&self) -> Superoperator {
        let parts = [(0, self.clone())];
        Superoperator::from_block_maps(BlockShape::single(self.k), &parts)
            .expect("single block map is well formed")
    }
}

impl From<BlockMap> for Superoperator {
    fn from(map: BlockMap) -> Self {
        map.to_superoperator()
    }
}

/// `vᴴ M u`
fn sandwich(v: &CVector, m: &CMatrix, u: &CVector) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for a in 0..m.nrows() {
        let row: C64 = (0..m.ncols()).map(|b| m[(a, b)] * u[b]).sum();
        acc += v[a].conj() * row;
    }
    acc
}

/// `tr(S M)` without forming the product.
fn trace_product(s: &CMatrix, m: &CMatrix) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for a in 0..s.nrows() {
        for b in 0..s.ncols() {
            acc += s[(a, b)] * m[(b, a)];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::functional_apply;
    use crate::numkit::{basis, c, matrix_unit};
    use crate::random::{gaussian_matrix, seeded, unit_vector};

    fn identity_map(n: usize) -> BlockMap {
        BlockMap::from_fn(n, n, |p, q| matrix_unit(n, p, q))
    }

    #[test]
    fn pullback_matches_trace_pairing() {
        let mut rng = seeded(3);
        let in_shape = BlockShape::new(vec![2, 3]).unwrap();
        let out_shape = BlockShape::new(vec![2, 1]).unwrap();
        let psi = Superoperator::from_fn(in_shape.clone(), out_shape.clone(), |_, _, _| {
            BlockElement::new(
                out_shape.clone(),
                vec![gaussian_matrix(&mut rng, 2, 2), gaussian_matrix(&mut rng, 1, 1)],
            )
            .unwrap()
        })
        .unwrap();
        let rho = Functional::new(
            out_shape.clone(),
            vec![gaussian_matrix(&mut rng, 2, 2), gaussian_matrix(&mut rng, 1, 1)],
        )
        .unwrap();
        let pulled = psi.pullback(&rho).unwrap();
        for _ in 0..5 {
            let a = BlockElement::new(
                in_shape.clone(),
                vec![gaussian_matrix(&mut rng, 2, 2), gaussian_matrix(&mut rng, 3, 3)],
            )
            .unwrap();
            let lhs = functional_apply(&pulled, &a).unwrap();
            let rhs = functional_apply(&rho, &psi.apply(&a).unwrap()).unwrap();
            assert!((lhs - rhs).norm() < 1e-10);
        }

        let u = unit_vector(&mut rng, 2);
        let v = unit_vector(&mut rng, 2);
        let direct = psi.pullback_vectors(0, &u, &v).unwrap();
        let via = psi
            .pullback(&Functional::vector_functional(&out_shape, 0, &u, &v).unwrap())
            .unwrap();
        assert!(direct.sub(&via).unwrap().norm() < 1e-12);
    }

    #[test]
    fn adjoint_unit_pairs_with_images() {
        // Oracle: tr(S_ij e_pq) must equal ⟨e_pq e_i, e_j⟩ = [p = j][q = i]
        // for the identity map.
        let map = identity_map(2);
        for i in 0..2 {
            for j in 0..2 {
                let s = map.adjoint_unit(i, j);
                for p in 0..2 {
                    for q in 0..2 {
                        let lhs = (&s * matrix_unit(2, p, q)).trace();
                        let rhs = (matrix_unit(2, p, q) * basis(2, i)).dotc(&basis(2, j));
                        let rhs = rhs.conj();
                        assert_eq!(lhs, rhs, "i={i} j={j} p={p} q={q}");
                    }
                }
                assert_eq!(s, matrix_unit(2, i, j));
                assert_eq!(s, map.adjoint_vectors(&basis(2, i), &basis(2, j)));
            }
        }
    }

    #[test]
    fn transpose_swaps_adjoint_indices() {
        let map = BlockMap::from_fn(2, 2, |p, q| matrix_unit(2, q, p));
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(map.adjoint_unit(i, j), matrix_unit(2, j, i));
            }
        }
    }

    #[test]
    fn zero_map_has_zero_adjoint() {
        let map = BlockMap::from_fn(2, 3, |_, _| CMatrix::zeros(3, 3));
        assert_eq!(map.adjoint_unit(1, 2), CMatrix::zeros(2, 2));
    }

    #[test]
    fn apply_is_linear_extension() {
        let map = identity_map(3);
        let mut rng = seeded(9);
        let t = gaussian_matrix(&mut rng, 3, 3);
        assert!((map.apply(&t) - &t).norm() < 1e-14);
        let psi = map.to_superoperator();
        let a = BlockElement::new(BlockShape::single(3), vec![t.clone()]).unwrap();
        assert!((psi.apply(&a).unwrap().block(0) - &t).norm() < 1e-14);
        assert!(psi.scale(c(2.0, 0.0)).max_image_distance(&psi).unwrap() > 0.9);
    }

    #[test]
    fn rejects_malformed_images() {
        let shape = BlockShape::single(2);
        assert!(Superoperator::new(shape.clone(), shape.clone(), vec![]).is_err());
        let wrong = vec![vec![BlockElement::zeros(&BlockShape::single(3)); 4]];
        assert!(Superoperator::new(shape.clone(), shape, wrong).is_err());
        assert!(BlockMap::new(2, 2, vec![CMatrix::zeros(2, 2); 3]).is_err());
    }
}
