//! Chimera graphs, their restricted-Boltzmann-machine partition, and the
//! pixel layout used for 4×4 images.
//!
//! Qubit numbering follows the usual Chimera convention: cell `(r, c)` owns
//! qubits `8 * (r * cols + c) + k` for `k` in `0..8`. Qubits `k < 4` form the
//! *vertical* side of the cell and couple to the same `k` in the cell below;
//! qubits `k >= 4` form the *horizontal* side and couple to the same `k` in the
//! cell to the right. Inside a cell every vertical qubit couples to every
//! horizontal qubit (a K₄,₄).

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

pub const CELL_SIDE: usize = 4;
pub const QUBITS_PER_CELL: usize = 2 * CELL_SIDE;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChimeraTopology {
    pub rows: usize,
    pub cols: usize,
    pub vertices: Vec<usize>,
    /// Unordered pairs stored as `(low, high)`, sorted ascending.
    pub edges: Vec<(usize, usize)>,
}

impl ChimeraTopology {
    pub fn qubit(&self, row: usize, col: usize, k: usize) -> usize {
        QUBITS_PER_CELL * (row * self.cols + col) + k
    }

    /// `(row, col, k)` of a qubit index.
    pub fn locate(&self, q: usize) -> (usize, usize, usize) {
        let cell = q / QUBITS_PER_CELL;
        (cell / self.cols, cell % self.cols, q % QUBITS_PER_CELL)
    }

    pub fn num_cells(&self) -> usize {
        self.rows * self.cols
    }

    /// Edge list text: one `i j` pair per line, ascending.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(self.edges.len() * 8);
        for &(i, j) in &self.edges {
            let _ = writeln!(out, "{i} {j}");
        }
        out
    }
}

pub fn build_chimera(rows: usize, cols: usize) -> Result<ChimeraTopology> {
    if rows == 0 || cols == 0 {
        return Err(Error::invalid(format!(
            "chimera dimensions must be positive, got {rows}x{cols}"
        )));
    }
    let cell_base = |r: usize, c: usize| QUBITS_PER_CELL * (r * cols + c);
    let mut edges = Vec::with_capacity(rows * cols * 20);
    for r in 0..rows {
        for c in 0..cols {
            let base = cell_base(r, c);
            for a in 0..CELL_SIDE {
                for b in CELL_SIDE..QUBITS_PER_CELL {
                    edges.push((base + a, base + b));
                }
            }
            if r + 1 < rows {
                let below = cell_base(r + 1, c);
                for k in 0..CELL_SIDE {
                    edges.push((base + k, below + k));
                }
            }
            if c + 1 < cols {
                let right = cell_base(r, c + 1);
                for k in CELL_SIDE..QUBITS_PER_CELL {
                    edges.push((base + k, right + k));
                }
            }
        }
    }
    edges.sort_unstable();
    Ok(ChimeraTopology {
        rows,
        cols,
        vertices: (0..QUBITS_PER_CELL * rows * cols).collect(),
        edges,
    })
}

/// How cell sides are assigned to the visible and hidden layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SideAssignment {
    /// The visible side alternates between cells like a checkerboard: the
    /// vertical side when `row + col` is even, the horizontal side otherwise.
    /// Every Chimera coupler joins opposite layers, so nothing is dropped.
    #[default]
    Checkerboard,
    /// The vertical side is visible in every cell. Inter-cell couplers then
    /// join units of the same layer and are dropped.
    Uniform,
}

/// Visible/hidden split of a Chimera graph.
///
/// `edges` holds the retained couplers as `(visible position, hidden
/// position)` pairs, i.e. indices into `visible` and `hidden`. Both vertex
/// lists are ordered by cell (row-major) and then by qubit index inside the
/// cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartitePartition {
    pub visible: Vec<usize>,
    pub hidden: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    /// Couplers dropped because both endpoints landed in the same layer.
    pub dropped: Vec<(usize, usize)>,
}

impl BipartitePartition {
    pub fn num_visible(&self) -> usize {
        self.visible.len()
    }

    pub fn num_hidden(&self) -> usize {
        self.hidden.len()
    }

    /// Qubit indices of each retained edge.
    pub fn qubit_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges
            .iter()
            .map(|&(v, h)| (self.visible[v], self.hidden[h]))
    }
}

/// Chimera-RBM with the default checkerboard assignment.
pub fn chimera_rbm(topology: &ChimeraTopology) -> BipartitePartition {
    chimera_rbm_with(topology, SideAssignment::default())
}

pub fn chimera_rbm_with(topology: &ChimeraTopology, rule: SideAssignment) -> BipartitePartition {
    let is_visible = |q: usize| {
        let (r, c, k) = topology.locate(q);
        let vertical = k < CELL_SIDE;
        match rule {
            SideAssignment::Checkerboard => vertical == ((r + c) % 2 == 0),
            SideAssignment::Uniform => vertical,
        }
    };
    let mut visible = Vec::new();
    let mut hidden = Vec::new();
    let mut position = vec![0usize; topology.vertices.len()];
    for &q in &topology.vertices {
        if is_visible(q) {
            position[q] = visible.len();
            visible.push(q);
        } else {
            position[q] = hidden.len();
            hidden.push(q);
        }
    }
    let mut edges = Vec::new();
    let mut dropped = Vec::new();
    for &(a, b) in &topology.edges {
        match (is_visible(a), is_visible(b)) {
            (true, false) => edges.push((position[a], position[b])),
            (false, true) => edges.push((position[b], position[a])),
            _ => dropped.push((a, b)),
        }
    }
    BipartitePartition {
        visible,
        hidden,
        edges,
        dropped,
    }
}

/// Side length of the square images mapped onto the visible layer.
pub const IMAGE_SIDE: usize = 4;

/// Bijection between the pixels of a 4×4 image and the visible units.
///
/// The default layout assigns pixel `(r, c)` to visible position `4 r + c`:
/// row-major pixels fill the cells in row-major order, four pixels per cell,
/// each cell's four visible qubits taken in ascending qubit index. On the
/// 2×2 Chimera-RBM every image row therefore lives on one cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelEmbedding {
    /// `mapping[r * 4 + c]` is the visible qubit for pixel `(r, c)`.
    pub mapping: Vec<usize>,
    positions: Vec<usize>,
    inverse: HashMap<usize, (usize, usize)>,
}

impl PixelEmbedding {
    pub fn vertex(&self, row: usize, col: usize) -> usize {
        self.mapping[row * IMAGE_SIDE + col]
    }

    /// Position of pixel `(row, col)` in the visible layer.
    pub fn visible_position(&self, row: usize, col: usize) -> usize {
        self.positions[row * IMAGE_SIDE + col]
    }

    pub fn pixel(&self, vertex: usize) -> Option<(usize, usize)> {
        self.inverse.get(&vertex).copied()
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    /// Reorder a row-major image into visible-layer order.
    pub fn embed_image(&self, pixels: &[i8]) -> Vec<i8> {
        let mut out = vec![0i8; pixels.len()];
        for (p, &value) in pixels.iter().enumerate() {
            out[self.positions[p]] = value;
        }
        out
    }
}

pub fn default_pixel_embedding(partition: &BipartitePartition) -> Result<PixelEmbedding> {
    let n = IMAGE_SIDE * IMAGE_SIDE;
    if partition.visible.len() != n {
        return Err(Error::invalid(format!(
            "pixel embedding needs {n} visible units, partition has {}",
            partition.visible.len()
        )));
    }
    let mapping = partition.visible.clone();
    let positions = (0..n).collect();
    let inverse = mapping
        .iter()
        .enumerate()
        .map(|(p, &q)| (q, (p / IMAGE_SIDE, p % IMAGE_SIDE)))
        .collect();
    Ok(PixelEmbedding {
        mapping,
        positions,
        inverse,
    })
}
