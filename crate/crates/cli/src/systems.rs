//! Turning a [`SystemSpec`] into a potential, and the bundled systems used by
//! the reproduction suites.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use orbit_census::billiard::{self, BilliardScene, ValidatedScene};
use orbit_census::potential::{Potential, Provenance};
use orbit_census::symbolic::{Cylinders, TransitionMatrix, Word};
use orbit_census::{Error, Result};

use crate::config::{RandomTable, SystemSpec, TableSource};

pub struct Built {
    pub potential: Potential,
    /// Present for billiard systems.
    pub scene: Option<ValidatedScene>,
}

pub fn random_potential(a: &TransitionMatrix, depth: usize, r: RandomTable) -> Result<Potential> {
    let mut rng = ChaCha8Rng::seed_from_u64(r.seed);
    let cyl = Cylinders::new(a, depth)?;
    let entries: Vec<(Word, f64)> = cyl
        .words()
        .iter()
        .map(|w| (w.clone(), rng.random_range(r.lo..r.hi)))
        .collect();
    Potential::from_table(a, depth, entries)
}

pub fn build(spec: &SystemSpec) -> std::result::Result<Built, crate::RunError> {
    match spec {
        SystemSpec::Table { matrix, depth, source } => {
            let a = TransitionMatrix::new(matrix)?;
            let potential = match source {
                TableSource::Entries(map) => {
                    let entries = map
                        .iter()
                        .map(|(w, &v)| Ok((Word::parse(w, a.size())?, v)))
                        .collect::<Result<Vec<_>>>()?;
                    Potential::from_table(&a, *depth, entries)?
                }
                TableSource::Csv(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| crate::RunError::Io {
                        path: path.display().to_string(),
                        source: e,
                    })?;
                    Potential::from_csv(&a, *depth, &text)?
                }
                TableSource::Random(r) => random_potential(&a, *depth, *r)?,
                TableSource::Constant(c) => {
                    Potential::from_fn(&a, *depth, Provenance::ExplicitTable, |_| *c)?
                }
            };
            Ok(Built {
                potential,
                scene: None,
            })
        }
        SystemSpec::Billiard {
            centers,
            radii,
            depth,
            window,
        } => {
            let scene = ValidatedScene::new(BilliardScene::from_parts(centers, radii)?)?;
            let potential = billiard::geometric_potential(&scene, *depth, *window)?;
            Ok(Built {
                potential,
                scene: Some(scene),
            })
        }
    }
}

fn no_repeat_rows(kappa: usize) -> Vec<Vec<u8>> {
    (0..kappa)
        .map(|i| (0..kappa).map(|j| u8::from(i != j)).collect())
        .collect()
}

/// Full 2-shift with `f = 1` on the first symbol and `2` on the second, so
/// that `e^{-P} + e^{-2P} = 1`.
pub fn golden() -> SystemSpec {
    SystemSpec::Table {
        matrix: vec![vec![1, 1], vec![1, 1]],
        depth: 1,
        source: TableSource::Entries(BTreeMap::from([("1".into(), 1.0), ("2".into(), 2.0)])),
    }
}

/// Seeded random depth-2 table on the 3-symbol no-repeat shift.
pub fn random_depth_two() -> SystemSpec {
    SystemSpec::Table {
        matrix: no_repeat_rows(3),
        depth: 2,
        source: TableSource::Random(RandomTable {
            seed: 0,
            lo: 0.5,
            hi: 2.0,
        }),
    }
}

/// Depth-2 table on the 3-symbol no-repeat shift whose periods pass the
/// lattice screen as non-lattice.
pub fn non_lattice() -> SystemSpec {
    let entries = [
        ("12", 2.667754),
        ("13", 1.735607),
        ("21", 2.409902),
        ("23", 2.600555),
        ("31", 0.821842),
        ("32", 2.092207),
    ];
    SystemSpec::Table {
        matrix: no_repeat_rows(3),
        depth: 2,
        source: TableSource::Entries(entries.iter().map(|&(w, v)| (w.to_string(), v)).collect()),
    }
}

/// Three unit disks on an equilateral triangle of side 6.
pub fn symmetric_billiard(depth: usize) -> SystemSpec {
    let h = 6.0 * 3f64.sqrt() / 2.0;
    SystemSpec::Billiard {
        centers: vec![[0.0, 0.0], [6.0, 0.0], [3.0, h]],
        radii: vec![1.0; 3],
        depth,
        window: billiard::DEFAULT_WINDOW,
    }
}

/// Every bundled system with a display name.
pub fn bundled() -> Vec<(String, SystemSpec)> {
    let mut out = vec![
        ("golden".to_string(), golden()),
        ("random-depth2".to_string(), random_depth_two()),
        ("non-lattice".to_string(), non_lattice()),
    ];
    for k in 2..=6 {
        out.push((format!("billiard-depth{k}"), symmetric_billiard(k)));
    }
    out
}

/// Shorthand for systems known to be valid.
pub fn build_bundled(spec: &SystemSpec) -> Potential {
    build(spec).expect("bundled systems are valid").potential
}

impl From<Error> for crate::RunError {
    fn from(e: Error) -> Self {
        crate::RunError::Core(e)
    }
}
