//! Engine output against the exhaustive unfolding search on random triples.

use geodenum_core::fixtures;
use geodenum_core::oracle::exhaustive_enumerate;
use geodenum_core::query::{enum_complete, enum_reduced};
use geodenum_core::{build_git, FaceId, GeodesicPath, Mode, SurfacePoint, TriangleMesh};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_point(m: &TriangleMesh, rng: &mut ChaCha8Rng) -> SurfacePoint {
    let f = rng.random_range(0..m.face_count());
    let a: f64 = rng.random_range(0.05..0.9);
    let b: f64 = rng.random_range(0.05..0.95 - a);
    SurfacePoint::Face {
        face: FaceId(f as u32),
        bary: [a, b, 1.0 - a - b],
    }
}

fn same_set(a: &[GeodesicPath], b: &[GeodesicPath]) -> Result<(), String> {
    let unmatched = |x: &[GeodesicPath], y: &[GeodesicPath]| {
        x.iter()
            .filter(|p| {
                !y.iter()
                    .any(|q| p.matches(q, 1e-6) && (p.length - q.length).abs() <= 1e-9 * p.length.max(1.0))
            })
            .map(|p| p.length)
            .collect::<Vec<_>>()
    };
    let (ua, ub) = (unmatched(a, b), unmatched(b, a));
    if ua.is_empty() && ub.is_empty() && a.len() == b.len() {
        Ok(())
    } else {
        Err(format!("{} vs {}; only left {ua:?}; only right {ub:?}", a.len(), b.len()))
    }
}

fn check(name: &str, m: &TriangleMesh, radii: (f64, f64), trials: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = m.mean_edge_length();
    let mut total = 0;
    for i in 0..trials {
        let s = random_point(m, &mut rng);
        let t = random_point(m, &mut rng);
        let r = scale * rng.random_range(radii.0..radii.1);
        let tc = build_git(m, s, r, Mode::Complete).unwrap();
        let tr = build_git(m, s, r, Mode::Reduced).unwrap();
        let c = enum_complete(m, &tc, t).unwrap();
        let red = enum_reduced(m, &tr, t).unwrap();
        let o = exhaustive_enumerate(m, s, t, r).unwrap();
        total += o.len();
        if let Err(e) = same_set(&c, &o) {
            panic!("{name} trial {i} ({s:?} -> {t:?}, R = {r}): complete vs oracle: {e}");
        }
        if let Err(e) = same_set(&red, &c) {
            panic!("{name} trial {i} ({s:?} -> {t:?}, R = {r}): reduced vs complete: {e}");
        }
    }
    eprintln!("{name}: {total} geodesics over {trials} trials");
    assert!(total > 0, "{name}: no geodesics found at all");
}

#[test]
fn tetrahedron() {
    check("tetrahedron", &fixtures::tetrahedron(), (1.0, 4.0), 10, 1);
}

#[test]
fn dented_octahedron() {
    check("dented", &fixtures::dented_octahedron(), (1.0, 3.5), 10, 2);
}

#[test]
fn coarse_torus() {
    check("torus", &fixtures::coarse_torus(), (1.0, 4.0), 6, 3);
}
