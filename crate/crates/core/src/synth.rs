//! Seeded generators for tables with one planted normalization defect.
//!
//! The same seed always yields the same rows. Cell values are short
//! alphanumeric labels, so rows can be written as CSV without quoting.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::nfclassifier::NormalForm;
use crate::snapshot::TableSnapshot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Planted {
    /// A cell holding a delimited list.
    ListCell,
    /// Part of a composite key determines a non-key column.
    PartialFd,
    /// A non-key column determines another non-key column.
    TransitiveFd,
    /// A non-superkey determines part of a key.
    NonSuperkeyFd,
    /// An all-key table whose groups are Cartesian products.
    NonFdMvd,
    Clean,
}

impl Planted {
    pub const ALL: [Planted; 6] = [
        Planted::ListCell,
        Planted::PartialFd,
        Planted::TransitiveFd,
        Planted::NonSuperkeyFd,
        Planted::NonFdMvd,
        Planted::Clean,
    ];

    /// The level a correct classifier reports for this defect.
    pub fn expected_level(self) -> NormalForm {
        match self {
            Planted::ListCell => NormalForm::Unnormalized,
            Planted::PartialFd => NormalForm::First,
            Planted::TransitiveFd => NormalForm::Second,
            Planted::NonSuperkeyFd => NormalForm::Third,
            Planted::NonFdMvd => NormalForm::Boyce,
            Planted::Clean => NormalForm::Fourth,
        }
    }

    pub fn slug(self) -> &'static str {
        match self {
            Planted::ListCell => "list-cell",
            Planted::PartialFd => "partial-fd",
            Planted::TransitiveFd => "transitive-fd",
            Planted::NonSuperkeyFd => "non-superkey-fd",
            Planted::NonFdMvd => "non-fd-mvd",
            Planted::Clean => "clean",
        }
    }
}

/// Header and rows of a generated table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generated {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Generated {
    pub fn to_table(&self, name: &str) -> TableSnapshot {
        let cols: Vec<&str> = self.columns.iter().map(String::as_str).collect();
        let rows: Vec<Vec<&str>> = self.rows.iter().map(|r| r.iter().map(String::as_str).collect()).collect();
        let refs: Vec<&[&str]> = rows.iter().map(Vec::as_slice).collect();
        TableSnapshot::from_text_rows(name, &cols, &refs).expect("generated rows match the header")
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

fn label(prefix: &str, i: usize) -> String {
    format!("{prefix}{i}")
}

fn cols(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Product pattern over `A × B` repeated `reps` times with a unique id `K`.
fn clean(rng: &mut ChaCha8Rng, scale: usize) -> Generated {
    let p = rng.random_range(2..=4) * scale;
    let q = rng.random_range(2..=4);
    let reps = rng.random_range(2..=3);
    let mut pairs = Vec::new();
    for a in 0..p {
        for b in 0..q {
            for _ in 0..reps {
                pairs.push((a, b));
            }
        }
    }
    pairs.shuffle(rng);
    let rows = pairs
        .into_iter()
        .enumerate()
        .map(|(k, (a, b))| vec![label("k", k), label("a", a), label("b", b)])
        .collect();
    Generated {
        columns: cols(&["K", "A", "B"]),
        rows,
    }
}

/// Composite key `{A, B}`; `C` depends on `A` alone and repeats across it.
fn partial(rng: &mut ChaCha8Rng, scale: usize) -> Generated {
    let p = rng.random_range(3..=5) * scale;
    let q = rng.random_range(2..=4);
    let images = rng.random_range(2..p);
    // surjective onto `images` values, so at least two A share a C
    let f: Vec<usize> = (0..p).map(|a| if a < images { a } else { rng.random_range(0..images) }).collect();
    let mut rows = Vec::new();
    for (a, &c) in f.iter().enumerate() {
        for b in 0..q {
            rows.push(vec![label("a", a), label("b", b), label("c", c)]);
        }
    }
    rows.shuffle(rng);
    Generated {
        columns: cols(&["A", "B", "C"]),
        rows,
    }
}

/// Unique `K`; `B` depends on the repeating non-key `A`.
fn transitive(rng: &mut ChaCha8Rng, scale: usize) -> Generated {
    let p = rng.random_range(2..=5) * scale;
    let g: Vec<usize> = (0..p).map(|_| rng.random_range(0..3)).collect();
    let mut values: Vec<usize> = (0..p).flat_map(|a| [a, a]).collect();
    let extra = rng.random_range(0..=p);
    values.extend((0..extra).map(|_| rng.random_range(0..p)));
    values.shuffle(rng);
    let rows = values
        .into_iter()
        .enumerate()
        .map(|(k, a)| vec![label("k", k), label("a", a), label("b", g[a])])
        .collect();
    Generated {
        columns: cols(&["K", "A", "B"]),
        rows,
    }
}

/// Every student takes every course; each course has two teachers and each
/// teacher one course. Keys are `{Student, Course}` and `{Student, Teacher}`.
fn non_superkey(rng: &mut ChaCha8Rng, scale: usize) -> Generated {
    let courses = rng.random_range(2..=4);
    let per_course = 2;
    let students = rng.random_range(4..=6) * scale;
    let mut rows = Vec::new();
    for s in 0..students {
        for c in 0..courses {
            // alternate teachers so every teacher has students
            let t = c * per_course + (s + c) % per_course;
            rows.push(vec![label("s", s), label("c", c), label("t", t)]);
        }
    }
    rows.shuffle(rng);
    Generated {
        columns: cols(&["Student", "Course", "Teacher"]),
        rows,
    }
}

/// All-key `X, Y, Z`; each `X` group is `Ys × Zs`, and every group shares
/// `y0, y1` and `z0, z1` so no pair of columns determines the third.
fn mvd(rng: &mut ChaCha8Rng, scale: usize) -> Generated {
    let groups = rng.random_range(2..=4) * scale;
    let mut rows = Vec::new();
    for x in 0..groups {
        let ys = 2 + rng.random_range(0..=2);
        let zs = 2 + rng.random_range(0..=2);
        for y in 0..ys {
            for z in 0..zs {
                rows.push(vec![label("x", x), label("y", y), label("z", z)]);
            }
        }
    }
    rows.shuffle(rng);
    Generated {
        columns: cols(&["X", "Y", "Z"]),
        rows,
    }
}

fn list_cell(rng: &mut ChaCha8Rng, scale: usize) -> Generated {
    let mut g = clean(rng, scale);
    let r = rng.random_range(0..g.rows.len());
    let other = if g.rows[r][2] == "b0" { "b1" } else { "b0" };
    g.rows[r][2] = format!("{};{other}", g.rows[r][2]);
    g
}

/// A table with exactly one planted defect. `scale` multiplies the number of
/// groups (1 gives roughly 10 to 60 rows).
pub fn planted(kind: Planted, seed: u64, scale: usize) -> Generated {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = scale.max(1);
    match kind {
        Planted::ListCell => list_cell(&mut rng, scale),
        Planted::PartialFd => partial(&mut rng, scale),
        Planted::TransitiveFd => transitive(&mut rng, scale),
        Planted::NonSuperkeyFd => non_superkey(&mut rng, scale),
        Planted::NonFdMvd => mvd(&mut rng, scale),
        Planted::Clean => clean(&mut rng, scale),
    }
}

/// Uniform random table over a small alphabet.
pub fn random_grid(seed: u64, columns: usize, rows: usize, alphabet: usize) -> Generated {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Generated {
        columns: (0..columns).map(|c| label("c", c)).collect(),
        rows: (0..rows)
            .map(|_| (0..columns).map(|_| label("v", rng.random_range(0..alphabet.max(1)))).collect())
            .collect(),
    }
}
