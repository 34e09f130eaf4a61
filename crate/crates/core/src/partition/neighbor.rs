//! Dynamic nearest-neighbor indices over planar point sets.
//!
//! Two interchangeable backends answer the same queries exactly:
//! [`ExhaustiveIndex`] scans every member, [`DelaunayIndex`] keeps an
//! incremental Delaunay triangulation and answers member queries from the
//! vertex's Delaunay neighbors.

use std::collections::HashMap;

use spade::handles::FixedVertexHandle;
use spade::{DelaunayTriangulation, HasPosition, Point2, Triangulation};

use crate::constellation::{dist_sq, Gaussian};
use crate::error::{Error, Result};

/// Which backend the set-partitioning code should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndexKind {
    #[default]
    Exhaustive,
    Delaunay,
}

pub trait NeighborIndex: Send {
    fn insert(&mut self, id: usize, pos: Gaussian) -> Result<()>;
    fn remove(&mut self, id: usize) -> Result<()>;
    /// Squared distance from an arbitrary probe to the nearest indexed point.
    fn search(&self, probe: Gaussian) -> Result<i64>;
    /// Squared distance from member `id` to its nearest other member, `None`
    /// when it is alone.
    fn member_search(&self, id: usize) -> Result<Option<i64>>;
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    fn contains(&self, id: usize) -> bool;
}

pub fn new_index(kind: IndexKind) -> Box<dyn NeighborIndex> {
    match kind {
        IndexKind::Exhaustive => Box::<ExhaustiveIndex>::default(),
        IndexKind::Delaunay => Box::<DelaunayIndex>::default(),
    }
}

#[derive(Debug, Default, Clone)]
pub struct ExhaustiveIndex {
    members: Vec<(usize, Gaussian)>,
    slot: HashMap<usize, usize>,
}

impl NeighborIndex for ExhaustiveIndex {
    fn insert(&mut self, id: usize, pos: Gaussian) -> Result<()> {
        if self.slot.contains_key(&id) || self.members.iter().any(|&(_, z)| z == pos) {
            return Err(Error::DuplicateInsert(id));
        }
        self.slot.insert(id, self.members.len());
        self.members.push((id, pos));
        Ok(())
    }

    fn remove(&mut self, id: usize) -> Result<()> {
        let at = self.slot.remove(&id).ok_or(Error::MissingRemove(id))?;
        self.members.swap_remove(at);
        if let Some(&(moved, _)) = self.members.get(at) {
            self.slot.insert(moved, at);
        }
        Ok(())
    }

    fn search(&self, probe: Gaussian) -> Result<i64> {
        self.members
            .iter()
            .map(|&(_, z)| dist_sq(z, probe))
            .min()
            .ok_or(Error::EmptyIndex)
    }

    fn member_search(&self, id: usize) -> Result<Option<i64>> {
        let at = *self.slot.get(&id).ok_or(Error::MissingRemove(id))?;
        let pos = self.members[at].1;
        Ok(self
            .members
            .iter()
            .filter(|&&(other, _)| other != id)
            .map(|&(_, z)| dist_sq(z, pos))
            .min())
    }

    fn len(&self) -> usize {
        self.members.len()
    }

    fn contains(&self, id: usize) -> bool {
        self.slot.contains_key(&id)
    }
}

#[derive(Debug, Clone, Copy)]
struct Site {
    id: usize,
    pos: Gaussian,
}

impl HasPosition for Site {
    type Scalar = f64;

    fn position(&self) -> Point2<f64> {
        // lattice coordinates are small integers, exact in f64
        Point2::new(self.pos.re as f64, self.pos.im as f64)
    }
}

#[derive(Default)]
pub struct DelaunayIndex {
    dt: DelaunayTriangulation<Site>,
    where_is: HashMap<usize, Gaussian>,
}

impl DelaunayIndex {
    fn handle_of(&self, pos: Gaussian) -> Option<FixedVertexHandle> {
        let p = Point2::new(pos.re as f64, pos.im as f64);
        let nn = self.dt.nearest_neighbor(p)?;
        (nn.data().pos == pos).then(|| nn.fix())
    }

    /// True when no indexed point lies strictly inside the circumcircle of
    /// any triangle. Exact integer arithmetic.
    pub fn empty_circumcircle_holds(&self) -> bool {
        let pts: Vec<Gaussian> = self.where_is.values().copied().collect();
        self.dt.inner_faces().all(|face| {
            let [a, b, c] = face.vertices().map(|v| v.data().pos);
            pts.iter()
                .filter(|&&p| p != a && p != b && p != c)
                .all(|&p| !strictly_in_circle(a, b, c, p))
        })
    }

    pub fn triangle_count(&self) -> usize {
        self.dt.num_inner_faces()
    }
}

/// Exact in-circle predicate; orientation-independent.
pub fn strictly_in_circle(a: Gaussian, b: Gaussian, c: Gaussian, p: Gaussian) -> bool {
    let row = |q: Gaussian| {
        let dx = (q.re - p.re) as i128;
        let dy = (q.im - p.im) as i128;
        (dx, dy, dx * dx + dy * dy)
    };
    let (ax, ay, a2) = row(a);
    let (bx, by, b2) = row(b);
    let (cx, cy, c2) = row(c);
    let det = ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
    let orient = (b.re - a.re) as i128 * (c.im - a.im) as i128
        - (b.im - a.im) as i128 * (c.re - a.re) as i128;
    if orient == 0 {
        return false;
    }
    det * orient.signum() > 0
}

impl NeighborIndex for DelaunayIndex {
    fn insert(&mut self, id: usize, pos: Gaussian) -> Result<()> {
        if self.where_is.contains_key(&id) || self.handle_of(pos).is_some() {
            return Err(Error::DuplicateInsert(id));
        }
        self.dt
            .insert(Site { id, pos })
            .map_err(|e| Error::InvalidDimensions(format!("triangulation insert failed: {e:?}")))?;
        self.where_is.insert(id, pos);
        Ok(())
    }

    fn remove(&mut self, id: usize) -> Result<()> {
        let pos = self.where_is.remove(&id).ok_or(Error::MissingRemove(id))?;
        let h = self.handle_of(pos).ok_or(Error::MissingRemove(id))?;
        self.dt.remove(h);
        Ok(())
    }

    fn search(&self, probe: Gaussian) -> Result<i64> {
        let p = Point2::new(probe.re as f64, probe.im as f64);
        let nn = self.dt.nearest_neighbor(p).ok_or(Error::EmptyIndex)?;
        Ok(dist_sq(nn.data().pos, probe))
    }

    fn member_search(&self, id: usize) -> Result<Option<i64>> {
        let pos = *self.where_is.get(&id).ok_or(Error::MissingRemove(id))?;
        let h = self.handle_of(pos).ok_or(Error::MissingRemove(id))?;
        let v = self.dt.vertex(h);
        Ok(v
            .out_edges()
            .map(|e| dist_sq(e.to().data().pos, pos))
            .min())
    }

    fn len(&self) -> usize {
        self.where_is.len()
    }

    fn contains(&self, id: usize) -> bool {
        self.where_is.contains_key(&id)
    }
}

// Site ids are only carried for debugging output.
impl std::fmt::Debug for DelaunayIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut ids: Vec<_> = self.dt.vertices().map(|v| v.data().id).collect();
        ids.sort_unstable();
        f.debug_struct("DelaunayIndex").field("ids", &ids).finish()
    }
}
