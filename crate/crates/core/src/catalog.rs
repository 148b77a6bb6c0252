//! Built-in example models: projective lines and planes, products,
//! Hirzebruch surfaces, spinning spheres, and free-circle products.

use crate::spaces::{FanModel, GkmEdge, GkmModel, SpaceModel};

/// Names understood by `model`.
pub fn names() -> Vec<&'static str> {
    vec![
        "P1",
        "P2",
        "P1xP1",
        "Hirzebruch:<a>",
        "SpinningSphere:<m>",
        "FreeCircleTimes:<model>",
    ]
}

/// Look up a catalog model by name.
pub fn model(name: &str) -> Option<SpaceModel> {
    let name = name.trim();
    match name {
        "P1" => Some(SpaceModel::Fan(
            FanModel::new(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).ok()?,
        )),
        "P2" => Some(SpaceModel::Fan(
            FanModel::new(
                2,
                vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
                vec![vec![0, 1], vec![1, 2], vec![0, 2]],
            )
            .ok()?,
        )),
        "P1xP1" => Some(SpaceModel::Fan(
            FanModel::new(
                2,
                vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]],
                vec![vec![0, 2], vec![2, 1], vec![1, 3], vec![3, 0]],
            )
            .ok()?,
        )),
        _ => {
            if let Some(a) = name.strip_prefix("Hirzebruch:") {
                let a: i64 = a.trim().parse().ok()?;
                return Some(SpaceModel::Fan(
                    FanModel::new(
                        2,
                        vec![vec![1, 0], vec![0, 1], vec![-1, a], vec![0, -1]],
                        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
                    )
                    .ok()?,
                ));
            }
            if let Some(m) = name.strip_prefix("SpinningSphere:") {
                let m: i64 = m.trim().parse().ok()?;
                if m == 0 {
                    return None;
                }
                return Some(SpaceModel::Gkm(
                    GkmModel::new(
                        1,
                        vec!["north".into(), "south".into()],
                        vec![GkmEdge {
                            v: 0,
                            w: 1,
                            label: vec![m],
                        }],
                    )
                    .ok()?,
                ));
            }
            if let Some(inner) = name.strip_prefix("FreeCircleTimes:") {
                return Some(SpaceModel::FreeCircleProduct(Box::new(model(inner)?)));
            }
            None
        }
    }
}
