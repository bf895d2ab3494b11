#[path = "support/collision_oracle.rs"]
mod collision_oracle;

use collision_oracle::{classify, Verdict};
use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tabletop_core::world::check_collision;
use tabletop_core::{Category, JointConfig, WorldObject, WorldState};

#[test]
fn analytic_check_matches_dense_sampler() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let home = JointConfig::new(0.0, 0.0, 0.4, 0.0).unwrap();
    let (mut decided, mut hits) = (0, 0);
    while decided < 100 {
        let (cat, ext) = if rng.random_bool(0.5) {
            (Category::Node, Vector3::new(0.025, 0.025, 0.025))
        } else {
            (Category::Link, Vector3::new(0.045, 0.0125, 0.0125))
        };
        let (ox, oy) = (rng.random_range(0.2..0.5), rng.random_range(-0.3..0.3));
        let obj = WorldObject::resting("o", cat, ox, oy, 0.0, rng.random_range(-3.1..3.1), ext).unwrap();
        let world = WorldState::new(home, 0.0, vec![obj]);
        let q = JointConfig::new(
            ox + rng.random_range(-0.06..0.06),
            oy + rng.random_range(-0.06..0.06),
            rng.random_range(0.0..0.08),
            rng.random_range(-3.1..3.1),
        )
        .unwrap();
        match classify(&world, &q) {
            Verdict::TooClose => continue,
            v => {
                decided += 1;
                hits += (v == Verdict::Hit) as u32;
                assert_eq!(check_collision(&world, &q), v == Verdict::Hit, "{q:?}");
            }
        }
    }
    assert!(hits > 10 && hits < 90, "both outcomes exercised: {hits}");
}
