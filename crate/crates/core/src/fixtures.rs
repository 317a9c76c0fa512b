//! Small built-in meshes used by tests, the CLI and benchmarks.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::math::{cos, sin, sqrt};
use crate::mesh::{TriangleMesh, VertexId};

/// Apex of [`dented_octahedron`]; the only hyperbolic vertex of that mesh.
pub const DENTED_APEX: VertexId = VertexId(0);

/// Hub of [`equilateral_fan`].
pub const FAN_HUB: VertexId = VertexId(0);

fn build(positions: Vec<[f64; 3]>, faces: &[[usize; 3]]) -> TriangleMesh {
    TriangleMesh::new(positions, faces).expect("fixture is a valid mesh")
}

/// Unit square in the `z = 0` plane split along the diagonal from vertex 1 to vertex 3.
pub fn flat_square() -> TriangleMesh {
    build(
        alloc::vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]],
        &[[0, 1, 3], [1, 2, 3]],
    )
}

/// Flat `nx × ny` grid of unit quads, each split into two triangles.
/// Vertex `(i, j)` has index `j * (nx + 1) + i`.
pub fn flat_grid(nx: usize, ny: usize) -> TriangleMesh {
    let mut p = Vec::new();
    for j in 0..=ny {
        for i in 0..=nx {
            p.push([i as f64, j as f64, 0.0]);
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut f = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            f.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            f.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    build(p, &f)
}

/// Regular tetrahedron with unit edges.
pub fn tetrahedron() -> TriangleMesh {
    let h = sqrt(2.0 / 3.0);
    let r = 1.0 / sqrt(3.0);
    build(
        alloc::vec![
            [r, 0.0, 0.0],
            [-r / 2.0, 0.5, 0.0],
            [-r / 2.0, -0.5, 0.0],
            [0.0, 0.0, h],
        ],
        &[[0, 2, 1], [0, 1, 3], [1, 2, 3], [2, 0, 3]],
    )
}

/// Unit cube `[0,1]³`, two triangles per face. Vertex `i` has coordinates
/// `(i & 1, (i >> 1) & 1, (i >> 2) & 1)`, so vertices 0 and 7 are opposite corners.
pub fn cube() -> TriangleMesh {
    let p: Vec<[f64; 3]> = (0..8)
        .map(|i| [(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64])
        .collect();
    // quads listed counterclockwise seen from outside
    let quads = [
        [0, 2, 3, 1], // z = 0
        [4, 5, 7, 6], // z = 1
        [0, 1, 5, 4], // y = 0
        [2, 6, 7, 3], // y = 1
        [0, 4, 6, 2], // x = 0
        [1, 3, 7, 5], // x = 1
    ];
    let mut f = Vec::new();
    for q in quads {
        f.push([q[0], q[1], q[2]]);
        f.push([q[0], q[2], q[3]]);
    }
    build(p, &f)
}

/// Octahedron whose top vertex sits below two of its raised neighbours and
/// above the other two, giving it a saddle-shaped link and `τ > 2π`.
pub fn dented_octahedron() -> TriangleMesh {
    build(
        alloc::vec![
            [0.0, 0.0, 0.2],
            [1.0, 0.0, 0.5],
            [0.0, 1.0, -0.5],
            [-1.0, 0.0, 0.5],
            [0.0, -1.0, -0.5],
            [0.0, 0.0, -1.0],
        ],
        &[
            [0, 1, 2],
            [0, 2, 3],
            [0, 3, 4],
            [0, 4, 1],
            [5, 2, 1],
            [5, 3, 2],
            [5, 4, 3],
            [5, 1, 4],
        ],
    )
}

/// Eight unit equilateral triangles around a hub (vertex 0); the rim zigzags
/// up and down so the hub has total angle `8π/3`. The rim is boundary.
pub fn equilateral_fan() -> TriangleMesh {
    // cos²ψ (1 + √2/2) − 1 = 1/2 makes neighbouring rim vertices unit distance apart
    let c2 = 1.5 / (1.0 + sqrt(0.5));
    let (c, s) = (sqrt(c2), sqrt(1.0 - c2));
    let mut p = alloc::vec![[0.0, 0.0, 0.0]];
    for k in 0..8 {
        let az = k as f64 * PI / 4.0;
        let z = if k % 2 == 0 { s } else { -s };
        p.push([c * cos(az), c * sin(az), z]);
    }
    let f: Vec<[usize; 3]> = (0..8).map(|k| [0, 1 + k, 1 + (k + 1) % 8]).collect();
    build(p, &f)
}

/// Torus of revolution around the z axis with `major × minor` quads split into triangles.
pub fn torus(major: usize, minor: usize, major_radius: f64, minor_radius: f64) -> TriangleMesh {
    let mut p = Vec::with_capacity(major * minor);
    for i in 0..major {
        let u = 2.0 * PI * i as f64 / major as f64;
        for j in 0..minor {
            let v = 2.0 * PI * j as f64 / minor as f64;
            let r = major_radius + minor_radius * cos(v);
            p.push([r * cos(u), r * sin(u), minor_radius * sin(v)]);
        }
    }
    let id = |i: usize, j: usize| (i % major) * minor + (j % minor);
    let mut f = Vec::with_capacity(2 * major * minor);
    for i in 0..major {
        for j in 0..minor {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            f.push([a, b, c]);
            f.push([a, c, d]);
        }
    }
    build(p, &f)
}

/// The torus used throughout tests: 8 × 6 segments, radii 3 and 1.
pub fn coarse_torus() -> TriangleMesh {
    torus(8, 6, 3.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::TAU;
    use crate::mesh::VertexClass;

    #[test]
    fn fan_hub_angle() {
        let m = equilateral_fan();
        assert!((m.total_angle(FAN_HUB) - 8.0 * PI / 3.0).abs() < 1e-12);
        for &h in m.fan(FAN_HUB).unwrap() {
            assert!((m.he_len(h) - 1.0).abs() < 1e-12);
            assert!((m.corner_angle(h) - PI / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn torus_has_saddles_and_chi_zero() {
        let m = coarse_torus();
        assert_eq!(m.euler_characteristic(), 0);
        assert!(m.is_closed());
        let saddles = (0..m.vertex_count())
            .filter(|&v| m.vertex_class(VertexId(v as u32)) == VertexClass::Hyperbolic)
            .count();
        assert!(saddles > 0);
    }

    #[test]
    fn cube_is_closed_and_convex() {
        let m = cube();
        assert!(m.is_closed());
        for v in 0..8 {
            assert!((m.total_angle(VertexId(v)) - 3.0 * TAU / 4.0).abs() < 1e-12);
        }
    }
}
