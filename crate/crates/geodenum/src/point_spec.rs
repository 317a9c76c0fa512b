//! Mesh-anchored point strings: `vertex:ID`, `edge:ID:U`, `face:ID:B0,B1,B2`.

use std::fmt;
use std::str::FromStr;

use geodenum_core::mesh::{EdgeId, FaceId, SurfacePoint, VertexId};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("malformed point spec {0:?}; expected vertex:ID, edge:ID:U or face:ID:B0,B1,B2")]
pub struct SpecError(pub String);

/// Parsed point spec. Not yet checked against a mesh.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointSpec(pub SurfacePoint);

impl FromStr for PointSpec {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, SpecError> {
        let err = || SpecError(s.to_owned());
        let mut parts = s.trim().split(':');
        let kind = parts.next().ok_or_else(err)?;
        let id: u32 = parts.next().ok_or_else(err)?.parse().map_err(|_| err())?;
        let rest = parts.next();
        if parts.next().is_some() {
            return Err(err());
        }
        let p = match (kind, rest) {
            ("vertex", None) => SurfacePoint::Vertex(VertexId(id)),
            ("edge", Some(u)) => SurfacePoint::Edge {
                edge: EdgeId(id),
                u: u.parse().map_err(|_| err())?,
            },
            ("face", Some(b)) => {
                let v: Vec<f64> = b.split(',').map(str::parse).collect::<Result<_, _>>().map_err(|_| err())?;
                SurfacePoint::Face {
                    face: FaceId(id),
                    bary: v.try_into().map_err(|_| err())?,
                }
            }
            _ => return Err(err()),
        };
        Ok(PointSpec(p))
    }
}

impl fmt::Display for PointSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            SurfacePoint::Vertex(v) => write!(f, "vertex:{}", v.0),
            SurfacePoint::Edge { edge, u } => write!(f, "edge:{}:{u:?}", edge.0),
            SurfacePoint::Face { face, bary: [a, b, c] } => write!(f, "face:{}:{a:?},{b:?},{c:?}", face.0),
        }
    }
}
