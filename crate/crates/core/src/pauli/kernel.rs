//! Strided contraction of a small transfer matrix against a coefficient vector.

/// Entries below this magnitude are rounding residue (e.g. `sin(pi)`) and are
/// not stored.
pub(crate) const DROP_TOLERANCE: f64 = 1e-14;

/// Row-compressed transfer matrix bound to concrete qubit sites.
#[derive(Debug, Clone)]
pub(crate) struct LocalKernel {
    dim: usize,
    /// Offset of local basis element `r` relative to the group base index.
    offsets: Vec<usize>,
    /// Qubit positions with a zero digit in every group base, ascending.
    sorted_sites: Vec<usize>,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl LocalKernel {
    /// `matrix` is row-major `dim x dim` with `dim = 4^sites.len()`; local index
    /// digit `k` (most significant first) belongs to `sites[k]`.
    pub(crate) fn new(matrix: &[f64], sites: &[usize]) -> Self {
        let arity = sites.len();
        let dim = 1usize << (2 * arity);
        debug_assert_eq!(matrix.len(), dim * dim);

        let offsets = (0..dim)
            .map(|local| {
                sites
                    .iter()
                    .enumerate()
                    .map(|(k, &s)| ((local >> (2 * (arity - 1 - k))) & 3) << (2 * s))
                    .sum()
            })
            .collect();

        let mut row_start = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_start.push(0);
        for r in 0..dim {
            for c in 0..dim {
                let v = matrix[r * dim + c];
                if v.abs() > DROP_TOLERANCE {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_start.push(cols.len());
        }

        let mut sorted_sites = sites.to_vec();
        sorted_sites.sort_unstable();

        Self {
            dim,
            offsets,
            sorted_sites,
            row_start,
            cols,
            vals,
        }
    }

    #[inline]
    fn group_base(&self, mut k: usize) -> usize {
        for &s in &self.sorted_sites {
            let low = k & ((1usize << (2 * s)) - 1);
            k = ((k >> (2 * s)) << (2 * s + 2)) | low;
        }
        k
    }

    /// The stretch of consecutive untouched qubits used as the vector axis:
    /// `(first qubit, number of qubits, untouched qubits below it)`. Unit
    /// stride is preferred when it is long enough to fill a chunk.
    fn vector_axes(&self, n: usize) -> (usize, usize, usize) {
        let mut stretches = Vec::new();
        let mut q = 0;
        let mut below = 0;
        while q < n {
            if self.sorted_sites.contains(&q) {
                q += 1;
                continue;
            }
            let start = q;
            while q < n && !self.sorted_sites.contains(&q) {
                q += 1;
            }
            stretches.push((start, q - start, below));
            below += q - start;
        }
        match stretches.first() {
            None => (0, 0, 0),
            Some(&s) if s.0 == 0 && s.1 >= 3 => s,
            Some(_) => stretches.iter().copied().max_by_key(|s| s.1).expect("non-empty"),
        }
    }

    /// Contract in place. Groups are visited in runs along the lowest qubit
    /// axes not acted on, and processed in chunks so the inner loops vectorize.
    pub(crate) fn apply(&self, coeffs: &mut [f64]) {
        const CHUNK: usize = 32;
        let dim = self.dim;
        let n = (coeffs.len().trailing_zeros() / 2) as usize;
        let (first, width, below) = self.vector_axes(n);
        let stride = 1usize << (2 * first);
        let run = 1usize << (2 * width);
        let low = 1usize << (2 * below);
        let len = run.min(CHUNK);
        let blocks = coeffs.len() / dim / run;
        let mut input = [[0.0f64; CHUNK]; 16];
        let mut output = [[0.0f64; CHUNK]; 16];
        for b in 0..blocks {
            let block_base = self.group_base((b / low) * run * low + b % low);
            for lo in (0..run).step_by(len) {
                let base = block_base + lo * stride;
                let mut any = false;
                for (slot, &off) in input.iter_mut().zip(&self.offsets) {
                    let start = base + off;
                    if stride == 1 {
                        slot[..len].copy_from_slice(&coeffs[start..start + len]);
                    } else {
                        for (i, x) in slot[..len].iter_mut().enumerate() {
                            *x = coeffs[start + i * stride];
                        }
                    }
                    any |= slot[..len].iter().any(|&x| x != 0.0);
                }
                if !any {
                    continue;
                }
                for (r, out) in output[..dim].iter_mut().enumerate() {
                    let out = &mut out[..len];
                    out.fill(0.0);
                    for e in self.row_start[r]..self.row_start[r + 1] {
                        let v = self.vals[e];
                        for (o, x) in out.iter_mut().zip(&input[self.cols[e]][..len]) {
                            *o += v * x;
                        }
                    }
                }
                for (out, &off) in output.iter().zip(&self.offsets) {
                    let start = base + off;
                    if stride == 1 {
                        coeffs[start..start + len].copy_from_slice(&out[..len]);
                    } else {
                        for (i, x) in out[..len].iter().enumerate() {
                            coeffs[start + i * stride] = *x;
                        }
                    }
                }
            }
        }
    }
}
