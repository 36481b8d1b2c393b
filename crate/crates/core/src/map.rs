//! Environment layout: bounds, walls and named rectangular regions.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::geometry::{cast_ray, Rect, Segment, StateVec, CARDINAL_RAYS};
use crate::rng::SimRng;

/// What a region means to the reward, filter and planner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionKind {
    Goal,
    Trap,
    Light,
    Start,
}

impl RegionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionKind::Goal => "goal",
            RegionKind::Trap => "trap",
            RegionKind::Light => "light",
            RegionKind::Start => "start",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub name: String,
    pub kind: RegionKind,
    pub rect: Rect,
}

impl Region {
    pub fn new(name: impl Into<String>, kind: RegionKind, rect: Rect) -> Self {
        Self {
            name: name.into(),
            kind,
            rect,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvMap {
    pub bounds: Rect,
    #[serde(default)]
    pub walls: Vec<Segment>,
    #[serde(default)]
    pub regions: Vec<Region>,
}

impl EnvMap {
    pub fn new(bounds: Rect, walls: Vec<Segment>, regions: Vec<Region>) -> Self {
        Self { bounds, walls, regions }
    }

    /// Checks the layout invariants: goal and start regions exist, have area
    /// and are wall-free; traps do not overlap goals.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.bounds.area() <= 0.0 {
            return Err(ConfigError::EmptyRegion("bounds".into()));
        }
        for kind in [RegionKind::Goal, RegionKind::Start] {
            if !self.regions.iter().any(|r| r.kind == kind) {
                return Err(ConfigError::MissingRegion(kind.as_str()));
            }
        }
        for region in &self.regions {
            if region.rect.area() <= 0.0 {
                return Err(ConfigError::EmptyRegion(region.name.clone()));
            }
            if matches!(region.kind, RegionKind::Goal | RegionKind::Start)
                && self.walls.iter().any(|w| region.rect.crossed_by(w))
            {
                return Err(ConfigError::RegionBlocked {
                    region: region.name.clone(),
                });
            }
        }
        for trap in self.regions_of(RegionKind::Trap) {
            if let Some(goal) = self.regions_of(RegionKind::Goal).find(|g| g.rect.overlaps(&trap.rect)) {
                return Err(ConfigError::TrapOverlapsGoal {
                    trap: trap.name.clone(),
                    goal: goal.name.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn regions_of(&self, kind: RegionKind) -> impl Iterator<Item = &Region> + '_ {
        self.regions.iter().filter(move |r| r.kind == kind)
    }

    pub fn in_region(&self, p: StateVec, kind: RegionKind) -> bool {
        self.regions_of(kind).any(|r| r.rect.contains(p))
    }

    pub fn in_goal(&self, p: StateVec) -> bool {
        self.in_region(p, RegionKind::Goal)
    }

    pub fn in_trap(&self, p: StateVec) -> bool {
        self.in_region(p, RegionKind::Trap)
    }

    /// True when moving in a straight line from `from` to `to` touches a wall.
    pub fn blocks(&self, from: StateVec, to: StateVec) -> bool {
        let path = Segment { a: from, b: to };
        self.walls.iter().any(|w| w.intersects(&path))
    }

    pub fn on_wall(&self, p: StateVec) -> bool {
        self.walls.iter().any(|w| w.distance_to(p) < 1e-9)
    }

    /// Noiseless radar ranges (up, down, left, right).
    pub fn ray_ranges(&self, p: StateVec) -> [f64; 4] {
        CARDINAL_RAYS.map(|d| cast_ray(&self.bounds, &self.walls, p, d))
    }

    /// True when a wall spanning the full width or height of the map lies
    /// strictly between `p` and `q`, i.e. they are in different rooms.
    pub fn partitioned(&self, p: StateVec, q: StateVec) -> bool {
        const TOL: f64 = 1e-9;
        let b = &self.bounds;
        self.walls.iter().any(|w| {
            let horizontal = (w.a.y - w.b.y).abs() < TOL;
            let vertical = (w.a.x - w.b.x).abs() < TOL;
            if horizontal && w.a.x.min(w.b.x) <= b.min.x + TOL && w.a.x.max(w.b.x) >= b.max.x - TOL {
                (p.y - w.a.y) * (q.y - w.a.y) < 0.0
            } else if vertical && w.a.y.min(w.b.y) <= b.min.y + TOL && w.a.y.max(w.b.y) >= b.max.y - TOL {
                (p.x - w.a.x) * (q.x - w.a.x) < 0.0
            } else {
                false
            }
        })
    }

    /// The goal region closest to `p`, preferring goals in the same room.
    pub fn nearest_goal(&self, p: StateVec) -> Option<&Region> {
        let key = |r: &Region| {
            let q = r.rect.nearest_point(p);
            (self.partitioned(p, q), p.distance(q))
        };
        self.regions_of(RegionKind::Goal)
            .min_by(|a, b| key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal))
    }

    /// Closest point of [`Self::nearest_goal`] to `p`.
    pub fn nearest_goal_point(&self, p: StateVec) -> Option<StateVec> {
        self.nearest_goal(p).map(|g| g.rect.nearest_point(p))
    }

    /// Uniform draw from the union of start regions (area weighted).
    pub fn sample_start(&self, rng: &mut SimRng) -> Result<StateVec, ConfigError> {
        let starts: Vec<&Region> = self.regions_of(RegionKind::Start).collect();
        let total: f64 = starts.iter().map(|r| r.rect.area()).sum();
        if starts.is_empty() || total <= 0.0 {
            return Err(ConfigError::MissingRegion("start"));
        }
        let mut pick = rng.random::<f64>() * total;
        let mut chosen = starts[starts.len() - 1];
        for r in &starts {
            if pick < r.rect.area() {
                chosen = r;
                break;
            }
            pick -= r.rect.area();
        }
        Ok(sample_rect(&chosen.rect, rng))
    }

    /// Uniform draw from the bounds, avoiding wall segments.
    pub fn sample_free(&self, rng: &mut SimRng) -> StateVec {
        loop {
            let p = sample_rect(&self.bounds, rng);
            if !self.on_wall(p) {
                return p;
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }
}

pub fn sample_rect(rect: &Rect, rng: &mut SimRng) -> StateVec {
    StateVec::new(
        rect.min.x + rng.random::<f64>() * rect.width(),
        rect.min.y + rng.random::<f64>() * rect.height(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_rooms() -> EnvMap {
        EnvMap::new(
            Rect::new(0.0, 0.0, 1.0, 1.0),
            vec![Segment::new(0.0, 0.5, 1.0, 0.5)],
            vec![
                Region::new("g_top", RegionKind::Goal, Rect::new(0.0, 0.7, 0.05, 0.8)),
                Region::new("g_bot", RegionKind::Goal, Rect::new(0.95, 0.2, 1.0, 0.3)),
                Region::new("s", RegionKind::Start, Rect::new(0.4, 0.2, 0.6, 0.3)),
            ],
        )
    }

    #[test]
    fn nearest_goal_stays_in_room() {
        let map = two_rooms();
        // Closer to the top goal in a straight line, but the floor wall separates them.
        let p = StateVec::new(0.3, 0.45);
        let q = map.nearest_goal_point(p).unwrap();
        assert_eq!(q, StateVec::new(0.95, 0.3));
    }

    #[test]
    fn validation_rejects_bad_layouts() {
        let mut map = two_rooms();
        assert!(map.validate().is_ok());
        map.regions
            .push(Region::new("t", RegionKind::Trap, Rect::new(0.0, 0.75, 0.1, 0.9)));
        assert!(matches!(map.validate(), Err(ConfigError::TrapOverlapsGoal { .. })));
        let mut map = two_rooms();
        map.regions.retain(|r| r.kind != RegionKind::Start);
        assert_eq!(map.validate(), Err(ConfigError::MissingRegion("start")));
        let mut map = two_rooms();
        map.walls.push(Segment::new(0.5, 0.0, 0.5, 0.4));
        assert!(matches!(map.validate(), Err(ConfigError::RegionBlocked { .. })));
    }

    #[test]
    fn json_round_trip() {
        let map = two_rooms();
        let text = serde_json::to_string(&map).unwrap();
        assert_eq!(EnvMap::from_json(&text).unwrap(), map);
    }
}
