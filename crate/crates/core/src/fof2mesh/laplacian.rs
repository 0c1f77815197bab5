//! Least-squares repair of unreliable vertices.
//!
//! Minimizes `||(D - A) X||^2` over the coordinates of the unreliable vertex
//! set `U` with every other vertex held fixed, where `D - A` is the uniform
//! (combinatorial) graph Laplacian of the mesh. Each axis is an independent
//! sparse least-squares problem, solved with conjugate gradients on the
//! normal equations (CGLS).

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::vec3::Vec3;

/// Vertex adjacency in CSR form plus the set of free vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianSystem {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    free: Vec<bool>,
    /// Unreliable vertices left in place because their connected component
    /// holds no reliable vertex.
    pub isolated: usize,
}

impl LaplacianSystem {
    /// Builds the vertex graph of `triangles`. Vertices flagged `true` in
    /// `movable` become free unless their component has no fixed vertex.
    pub fn new(vertex_count: usize, triangles: &[[u32; 3]], movable: &[bool]) -> Self {
        assert_eq!(movable.len(), vertex_count, "one flag per vertex");
        let mut edges: Vec<(u32, u32)> = triangles
            .iter()
            .flat_map(|&[a, b, c]| [(a, b), (b, a), (b, c), (c, b), (c, a), (a, c)])
            .filter(|(a, b)| a != b)
            .collect();
        edges.sort_unstable();
        edges.dedup();
        let mut offsets = vec![0usize; vertex_count + 1];
        for &(a, _) in &edges {
            offsets[a as usize + 1] += 1;
        }
        for i in 0..vertex_count {
            offsets[i + 1] += offsets[i];
        }
        let neighbors = edges.into_iter().map(|(_, b)| b).collect();
        let mut system = Self {
            offsets,
            neighbors,
            free: movable.to_vec(),
            isolated: 0,
        };
        system.pin_unanchored_components();
        system
    }

    fn pin_unanchored_components(&mut self) {
        let n = self.free.len();
        let mut component = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        let mut members = Vec::new();
        for start in 0..n {
            if component[start] != usize::MAX {
                continue;
            }
            component[start] = start;
            queue.push_back(start);
            members.clear();
            let mut anchored = false;
            while let Some(v) = queue.pop_front() {
                members.push(v);
                anchored |= !self.free[v];
                for &u in self.neighbors(v) {
                    let u = u as usize;
                    if component[u] == usize::MAX {
                        component[u] = start;
                        queue.push_back(u);
                    }
                }
            }
            if !anchored {
                for &v in &members {
                    if self.free[v] && self.degree(v) > 0 {
                        self.isolated += 1;
                    }
                    self.free[v] = false;
                }
            }
        }
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn vertex_count(&self) -> usize {
        self.free.len()
    }

    pub fn is_free(&self, v: usize) -> bool {
        self.free[v]
    }

    pub fn free_count(&self) -> usize {
        self.free.iter().filter(|&&f| f).count()
    }

    /// `out = (D - A) x`.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (v, o) in out.iter_mut().enumerate() {
            let nb = self.neighbors(v);
            let sum: f64 = nb.iter().map(|&u| x[u as usize]).sum();
            *o = nb.len() as f64 * x[v] - sum;
        }
    }

    /// `||(D - A) X||^2` summed over the three axes.
    pub fn energy(&self, vertices: &[Vec3]) -> f64 {
        (0..vertices.len())
            .map(|v| {
                let nb = self.neighbors(v);
                let sum = nb.iter().fold(Vec3::ZERO, |acc, &u| acc + vertices[u as usize]);
                (vertices[v] * nb.len() as f64 - sum).norm_squared()
            })
            .sum()
    }

    /// CGLS on one axis. `x` holds all vertex coordinates on entry and the
    /// optimized ones on exit; only free entries change. Returns the number of
    /// iterations.
    pub fn solve_axis(&self, x: &mut [f64], tolerance: f64, max_iterations: usize) -> usize {
        let mut v: Vec<Vec3> = x.iter().map(|&c| Vec3::new(c, 0.0, 0.0)).collect();
        let iterations = self.solve(&mut v, tolerance, max_iterations)[0];
        for (c, p) in x.iter_mut().zip(&v) {
            *c = p.x;
        }
        iterations
    }

    /// CGLS on all three axes at once. The axes share the operator but keep
    /// their own step sizes and stop independently. Returns the iteration
    /// count of each axis.
    ///
    /// The normal equations are Jacobi preconditioned; convergence is judged
    /// on the unpreconditioned residual relative to their right-hand side.
    pub fn solve(&self, x: &mut [Vec3], tolerance: f64, max_iterations: usize) -> [usize; 3] {
        let n = self.vertex_count();
        assert_eq!(x.len(), n, "one position per vertex");
        let free: Vec<usize> = (0..n).filter(|&v| self.free[v]).collect();
        if free.is_empty() {
            return [0; 3];
        }
        let op = CompactOperator::new(self, &free);
        let m = op.rows.len();

        // r = b - A x_U over the rows touching U; b = -(D - A) x with x_U = 0
        let mut b = vec![Vec3::ZERO; m];
        let mut r = vec![Vec3::ZERO; m];
        for (k, &w) in op.rows.iter().enumerate() {
            let nb = self.neighbors(w);
            let own = if self.free[w] { Vec3::ZERO } else { x[w] };
            let mut fixed = own * nb.len() as f64;
            let mut all = x[w] * nb.len() as f64;
            for &u in nb {
                let xu = x[u as usize];
                all -= xu;
                if !self.free[u as usize] {
                    fixed -= xu;
                }
            }
            b[k] = -fixed;
            r[k] = -all;
        }
        let mut s = vec![Vec3::ZERO; free.len()];
        op.normal(&b, &mut s);
        let threshold = squares(s.iter()).map(|g| g * tolerance * tolerance);
        drop(b);

        let mut xu: Vec<Vec3> = free.iter().map(|&v| x[v]).collect();
        op.normal(&r, &mut s);
        let mut z: Vec<Vec3> = s.iter().zip(&op.weight).map(|(&si, &w)| si * w).collect();
        let mut p = z.clone();
        let mut q = vec![Vec3::ZERO; m];
        let mut gamma = dots(s.iter().zip(&z));
        let mut residual = squares(s.iter());
        let mut iterations = [0usize; 3];
        loop {
            let mut on: [bool; 3] = core::array::from_fn(|a| {
                iterations[a] < max_iterations && residual[a] > threshold[a] && residual[a] > 0.0
            });
            if on == [false; 3] {
                break;
            }
            let qq = op.forward(&p, &mut q);
            let mut alpha = [0.0; 3];
            for a in 0..3 {
                if on[a] && qq[a] > 0.0 {
                    alpha[a] = gamma[a] / qq[a];
                } else {
                    on[a] = false;
                }
            }
            if on == [false; 3] {
                break;
            }
            let alpha = Vec3::from(alpha);
            for (ri, &qi) in r.iter_mut().zip(&q) {
                *ri -= scale(qi, alpha);
            }
            op.normal(&r, &mut s);
            let mut next = [0.0; 3];
            residual = [0.0; 3];
            for ((zi, &si), &w) in z.iter_mut().zip(&s).zip(&op.weight) {
                *zi = si * w;
                next = [next[0] + si.x * zi.x, next[1] + si.y * zi.y, next[2] + si.z * zi.z];
                residual = [
                    residual[0] + si.x * si.x,
                    residual[1] + si.y * si.y,
                    residual[2] + si.z * si.z,
                ];
            }
            let mut beta = [0.0; 3];
            for a in 0..3 {
                if on[a] {
                    beta[a] = next[a] / gamma[a];
                    gamma[a] = next[a];
                    iterations[a] += 1;
                } else {
                    residual[a] = 0.0;
                }
            }
            let beta = Vec3::from(beta);
            // frozen axes keep a zero search direction
            let keep = Vec3::from(on.map(|o| if o { 1.0 } else { 0.0 }));
            for ((xi, pi), &zi) in xu.iter_mut().zip(p.iter_mut()).zip(&z) {
                *xi += scale(*pi, alpha);
                *pi = scale(zi + scale(*pi, beta), keep);
            }
        }
        for (&v, &value) in free.iter().zip(&xu) {
            x[v] = value;
        }
        iterations
    }

    /// `rounds` Jacobi steps of uniform Laplacian smoothing on the free
    /// vertices: each moves to the mean of its neighbors.
    pub fn smooth(&self, vertices: &mut [Vec3], rounds: usize) {
        let mut next = vertices.to_vec();
        for _ in 0..rounds {
            for v in 0..vertices.len() {
                let nb = self.neighbors(v);
                if !self.free[v] || nb.is_empty() {
                    continue;
                }
                let sum = nb.iter().fold(Vec3::ZERO, |acc, &u| acc + vertices[u as usize]);
                next[v] = sum / nb.len() as f64;
            }
            vertices.copy_from_slice(&next);
        }
    }
}

/// The Laplacian columns of the free vertices, renumbered so that CGLS only
/// touches the rows they appear in.
struct CompactOperator {
    /// Graph vertex of each touched row.
    rows: Vec<usize>,
    /// Degree of each touched row.
    row_degree: Vec<f64>,
    /// Free column index of each touched row, if the row's vertex is free.
    row_self: Vec<u32>,
    /// Free neighbors of each row, as column indices.
    row_offsets: Vec<usize>,
    row_columns: Vec<u32>,
    /// For each free column: its own row and its neighbors' rows.
    col_degree: Vec<f64>,
    col_self: Vec<u32>,
    col_offsets: Vec<usize>,
    col_rows: Vec<u32>,
    weight: Vec<f64>,
}

const ABSENT: u32 = u32::MAX;

impl CompactOperator {
    fn new(system: &LaplacianSystem, free: &[usize]) -> Self {
        let n = system.vertex_count();
        let mut column = vec![ABSENT; n];
        for (c, &v) in free.iter().enumerate() {
            column[v] = c as u32;
        }
        let mut touched = vec![false; n];
        for &v in free {
            touched[v] = true;
            for &u in system.neighbors(v) {
                touched[u as usize] = true;
            }
        }
        let rows: Vec<usize> = (0..n).filter(|&v| touched[v]).collect();
        let mut row_index = vec![ABSENT; n];
        for (k, &w) in rows.iter().enumerate() {
            row_index[w] = k as u32;
        }

        let mut row_offsets = vec![0];
        let mut row_columns = Vec::new();
        for &w in &rows {
            row_columns.extend(
                system
                    .neighbors(w)
                    .iter()
                    .map(|&u| column[u as usize])
                    .filter(|&c| c != ABSENT),
            );
            row_offsets.push(row_columns.len());
        }
        let mut col_offsets = vec![0];
        let mut col_rows = Vec::new();
        for &v in free {
            col_rows.extend(system.neighbors(v).iter().map(|&u| row_index[u as usize]));
            col_offsets.push(col_rows.len());
        }
        let col_degree: Vec<f64> = free.iter().map(|&v| system.degree(v) as f64).collect();
        Self {
            row_degree: rows.iter().map(|&w| system.degree(w) as f64).collect(),
            row_self: rows.iter().map(|&w| column[w]).collect(),
            rows,
            row_offsets,
            row_columns,
            col_self: free.iter().map(|&v| row_index[v]).collect(),
            col_offsets,
            col_rows,
            weight: col_degree.iter().map(|&d| 1.0 / (d * d + d)).collect(),
            col_degree,
        }
    }

    /// `q = A p` on the touched rows; returns the per-axis squared norm of `q`.
    fn forward(&self, p: &[Vec3], q: &mut [Vec3]) -> [f64; 3] {
        let mut norm = [0.0; 3];
        for (k, qk) in q.iter_mut().enumerate() {
            let own = match self.row_self[k] {
                ABSENT => Vec3::ZERO,
                c => p[c as usize] * self.row_degree[k],
            };
            let cols = &self.row_columns[self.row_offsets[k]..self.row_offsets[k + 1]];
            let v = cols.iter().fold(own, |acc, &c| acc - p[c as usize]);
            *qk = v;
            norm = [norm[0] + v.x * v.x, norm[1] + v.y * v.y, norm[2] + v.z * v.z];
        }
        norm
    }

    /// `s = A^T r` for every free column.
    fn normal(&self, r: &[Vec3], s: &mut [Vec3]) {
        for (c, sc) in s.iter_mut().enumerate() {
            let rows = &self.col_rows[self.col_offsets[c]..self.col_offsets[c + 1]];
            let own = r[self.col_self[c] as usize] * self.col_degree[c];
            *sc = rows.iter().fold(own, |acc, &k| acc - r[k as usize]);
        }
    }
}

#[inline]
fn scale(a: Vec3, b: Vec3) -> Vec3 {
    Vec3::new(a.x * b.x, a.y * b.y, a.z * b.z)
}

fn squares<'a>(values: impl Iterator<Item = &'a Vec3>) -> [f64; 3] {
    values.fold([0.0; 3], |acc, v| [acc[0] + v.x * v.x, acc[1] + v.y * v.y, acc[2] + v.z * v.z])
}

fn dots<'a>(pairs: impl Iterator<Item = (&'a Vec3, &'a Vec3)>) -> [f64; 3] {
    pairs.fold([0.0; 3], |acc, (a, b)| [acc[0] + a.x * b.x, acc[1] + a.y * b.y, acc[2] + a.z * b.z])
}

/// Convergence target of the CGLS solve: normal-equation residual relative to
/// its starting value.
pub const RELATIVE_RESIDUAL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LaplacianReport {
    pub free_vertices: usize,
    pub isolated: usize,
    pub iterations: [usize; 3],
    pub energy_before: f64,
    pub energy_after: f64,
}

/// Minimizes the Laplacian energy over the free vertices of `system`, in place.
pub fn solve_constraint(system: &LaplacianSystem, vertices: &mut [Vec3]) -> LaplacianReport {
    let free = system.free_count();
    let mut report = LaplacianReport {
        free_vertices: free,
        isolated: system.isolated,
        energy_before: system.energy(vertices),
        ..LaplacianReport::default()
    };
    report.iterations = system.solve(vertices, RELATIVE_RESIDUAL, 10 * free);
    report.energy_after = system.energy(vertices);
    report
}
