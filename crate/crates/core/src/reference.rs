//! Published benchmark values, transcribed row by row.
//!
//! Bounds are as printed (three decimals). Times are seconds and are never
//! compared. Rows whose graphs cannot be regenerated exactly name a file
//! that a user may supply, or a same-parameter surrogate that is compared
//! on properties only.

use std::fmt::Write as _;

use crate::generators::GenSpec;
use crate::model::Problem;

/// Where the graph for a row comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    /// Deterministic generator reproducing the published instance.
    Generated(GenSpec),
    /// Same family and parameters, different random draw.
    Surrogate(GenSpec),
    /// DIMACS file looked up by stem in a user-supplied directory.
    File(&'static str),
}

/// Known optimum as a closed range; `lo == hi` when exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Known {
    pub lo: Option<u32>,
    pub hi: Option<u32>,
}

impl Known {
    const fn exact(v: u32) -> Self {
        Known {
            lo: Some(v),
            hi: Some(v),
        }
    }

    const fn at_least(v: u32) -> Self {
        Known {
            lo: Some(v),
            hi: None,
        }
    }

    const fn range(lo: u32, hi: u32) -> Self {
        Known {
            lo: Some(lo),
            hi: Some(hi),
        }
    }

    const fn unknown() -> Self {
        Known { lo: None, hi: None }
    }

    pub fn exact_value(&self) -> Option<u32> {
        match (self.lo, self.hi) {
            (Some(lo), Some(hi)) if lo == hi => Some(lo),
            _ => None,
        }
    }
}

impl std::fmt::Display for Known {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.lo, self.hi) {
            (Some(lo), Some(hi)) if lo == hi => write!(f, "{lo}"),
            (Some(lo), Some(hi)) => write!(f, "{lo}..{hi}"),
            (Some(lo), None) => write!(f, ">={lo}"),
            (None, Some(hi)) => write!(f, "<={hi}"),
            (None, None) => f.write_str("-"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceRecord {
    pub table: u8,
    pub name: &'static str,
    pub problem: Problem,
    pub n: usize,
    pub m: usize,
    /// Alpha for stable rows, chi for coloring rows.
    pub known: Known,
    pub theta: f64,
    pub bound1: f64,
    pub time1: f64,
    pub bound2: f64,
    pub time2: f64,
    /// Comparison bound and its time, where the table lists one.
    pub gr: Option<(f64, f64)>,
    pub source: Source,
}

/// Largest generated instance run by default.
pub const DESK_SCALE_MAX_N: usize = 125;

impl ReferenceRecord {
    pub fn is_desk_scale(&self) -> bool {
        !matches!(self.source, Source::File(_)) && self.n <= DESK_SCALE_MAX_N
    }

    /// Integer bound implied by the published BOUND 2.
    pub fn integer_bound2(&self) -> i64 {
        crate::cutloop::integer_bound(self.problem, self.bound2)
    }
}

const S: Problem = Problem::Stable;
const C: Problem = Problem::Coloring;

#[allow(clippy::too_many_arguments)]
const fn row(
    table: u8,
    name: &'static str,
    problem: Problem,
    n: usize,
    m: usize,
    known: Known,
    theta: f64,
    b1: (f64, f64),
    b2: (f64, f64),
    gr: Option<(f64, f64)>,
    source: Source,
) -> ReferenceRecord {
    ReferenceRecord {
        table,
        name,
        problem,
        n,
        m,
        known,
        theta,
        bound1: b1.0,
        time1: b1.1,
        bound2: b2.0,
        time2: b2.1,
        gr,
        source,
    }
}

const fn reg(n: usize, r: usize) -> Source {
    Source::Surrogate(GenSpec::NearRegular { n, r, seed: 0 })
}

const fn rand(n: usize, p: f64) -> Source {
    Source::Surrogate(GenSpec::ErdosRenyi { n, p, seed: 0 })
}

const fn torus(d: usize) -> Source {
    Source::Generated(GenSpec::Torus { d })
}

const fn queen(d: usize) -> Source {
    Source::Generated(GenSpec::Queen { d })
}

const fn myciel(levels: usize) -> Source {
    Source::Generated(GenSpec::Mycielski { levels })
}

#[rustfmt::skip]
static RECORDS: [ReferenceRecord; 55] = [
    row(1, "reg_n100_r4", S, 100, 195, Known::at_least(40), 43.449, (41.246, 17.0), (40.713, 41.0), Some((40.687, 1164.0)), reg(100, 4)),
    row(1, "reg_n100_r6", S, 100, 294, Known::at_least(34), 37.815, (36.224, 7.0), (35.047, 32.0), Some((35.246, 1062.0)), reg(100, 6)),
    row(1, "reg_n100_r8", S, 100, 377, Known::at_least(31), 34.480, (33.337, 4.0), (32.063, 21.0), Some((32.190, 1067.0)), reg(100, 8)),
    row(1, "reg_n200_r4", S, 200, 400, Known::at_least(80), 87.759, (83.498, 111.0), (82.246, 260.0), Some((83.772, 1437.0)), reg(200, 4)),
    row(1, "reg_n200_r6", S, 200, 593, Known::at_least(68), 79.276, (76.047, 25.0), (73.709, 229.0), Some((75.555, 1523.0)), reg(200, 6)),
    row(1, "reg_n200_r8", S, 200, 792, Known::at_least(60), 70.790, (69.110, 11.0), (66.789, 78.0), Some((67.785, 1944.0)), reg(200, 8)),
    row(1, "reg_n200_r10", S, 200, 980, Known::at_least(57), 66.418, (65.142, 6.0), (62.695, 75.0), Some((62.894, 2556.0)), reg(200, 10)),

    row(2, "rand_n100_p004", S, 100, 212, Known::exact(45), 46.067, (45.032, 22.0), (45.032, 1.0), Some((45.021, 432.0)), rand(100, 0.04)),
    row(2, "rand_n100_p006", S, 100, 303, Known::exact(38), 40.361, (38.909, 13.0), (38.435, 20.0), Some((38.439, 887.0)), rand(100, 0.06)),
    row(2, "rand_n100_p008", S, 100, 443, Known::exact(32), 34.847, (33.575, 5.0), (32.433, 23.0), Some((32.579, 1262.0)), rand(100, 0.08)),
    row(2, "rand_n100_p010", S, 100, 489, Known::exact(32), 34.020, (32.934, 5.0), (32.151, 17.0), Some((32.191, 1138.0)), rand(100, 0.10)),
    row(2, "rand_n200_p002", S, 200, 407, Known::exact(95), 95.778, (95.044, 222.0), (95.044, 1.0), Some((95.032, 836.0)), rand(200, 0.02)),
    row(2, "rand_n200_p003", S, 200, 631, Known::exact(80), 83.662, (81.560, 39.0), (81.079, 52.0), Some((81.224, 1867.0)), rand(200, 0.03)),
    row(2, "rand_n200_p004", S, 200, 816, Known::exact(67), 73.908, (71.654, 17.0), (69.818, 96.0), Some((70.839, 2227.0)), rand(200, 0.04)),
    row(2, "rand_n200_p005", S, 200, 991, Known::exact(62), 69.039, (67.313, 19.0), (65.544, 70.0), Some((66.091, 2411.0)), rand(200, 0.05)),

    row(3, "torus_5", S, 25, 50, Known::exact(10), 11.180, (10.000, 1.0), (10.000, 1.0), Some((10.002, 33.0)), torus(5)),
    row(3, "torus_7", S, 49, 98, Known::exact(21), 23.224, (21.000, 2.0), (21.000, 1.0), Some((21.009, 127.0)), torus(7)),
    row(3, "torus_9", S, 81, 162, Known::exact(36), 39.241, (36.000, 24.0), (36.000, 7.0), Some((36.021, 344.0)), torus(9)),
    row(3, "torus_11", S, 121, 242, Known::exact(55), 59.249, (55.022, 81.0), (55.019, 19.0), Some((55.066, 851.0)), torus(11)),
    row(3, "torus_13", S, 169, 338, Known::exact(78), 83.254, (78.379, 337.0), (78.048, 129.0), Some((79.084, 1031.0)), torus(13)),
    row(3, "torus_15", S, 225, 450, Known::exact(105), 111.257, (108.208, 1517.0), (105.214, 504.0), Some((106.287, 1615.0)), torus(15)),

    row(4, "spin5", S, 125, 375, Known::exact(50), 55.902, (50.000, 17.0), (50.000, 6.0), None, Source::File("spin5")),
    row(4, "spin7", S, 343, 1029, Known::range(147, 151), 162.566, (147.000, 1225.0), (147.000, 639.0), None, Source::File("spin7")),
    row(4, "MANN_a9", S, 45, 72, Known::exact(16), 17.475, (17.220, 2.0), (17.220, 1.0), None, Source::File("MANN_a9")),
    row(4, "MANN_a27", S, 378, 702, Known::exact(126), 132.763, (131.709, 781.0), (131.112, 874.0), None, Source::File("MANN_a27")),
    row(4, "C125.9", S, 125, 787, Known::exact(34), 37.805, (36.920, 4.0), (35.568, 32.0), None, Source::File("C125.9")),
    row(4, "C250.9", S, 250, 3141, Known::exact(44), 56.241, (55.771, 18.0), (54.899, 479.0), None, Source::File("C250.9")),
    row(4, "sanr200_0_9", S, 200, 2037, Known::exact(42), 49.274, (48.723, 11.0), (47.472, 229.0), None, Source::File("sanr200_0_9")),

    row(5, "evil-N120-p98-chv12x10", S, 120, 545, Known::exact(20), 24.526, (24.526, 1.0), (20.000, 2.0), None, Source::File("evil-N120-p98-chv12x10")),
    row(5, "evil-N120-p98-myc5x24", S, 120, 236, Known::exact(48), 52.607, (48.000, 22.0), (48.000, 16.0), None, Source::File("evil-N120-p98-myc5x24")),
    row(5, "evil-N121-p98-myc11x11", S, 121, 508, Known::exact(22), 26.397, (26.397, 1.0), (22.000, 1.0), None, Source::File("evil-N121-p98-myc11x11")),
    row(5, "evil-N125-p98-s3m25x5", S, 125, 873, Known::exact(20), 25.000, (22.361, 1.0), (22.361, 5.0), None, Source::File("evil-N125-p98-s3m25x5")),
    row(5, "evil-N138-p98-myc23x6", S, 138, 1242, Known::exact(12), 15.177, (15.177, 1.0), (15.177, 3.0), None, Source::File("evil-N138-p98-myc23x6")),
    row(5, "evil-N150-p98-myc5x30", S, 150, 338, Known::exact(60), 65.121, (60.000, 32.0), (60.000, 43.0), None, Source::File("evil-N150-p98-myc5x30")),
    row(5, "evil-N150-p98-s3m25x6", S, 150, 1102, Known::exact(24), 30.000, (26.833, 2.0), (26.833, 8.0), None, Source::File("evil-N150-p98-s3m25x6")),
    row(5, "evil-N154-p98-myc11x14", S, 154, 701, Known::exact(28), 33.596, (33.596, 1.0), (28.000, 2.0), None, Source::File("evil-N154-p98-myc11x14")),
    row(5, "evil-N180-p98-chv12x15", S, 180, 944, Known::exact(30), 36.788, (36.788, 1.0), (30.000, 5.0), None, Source::File("evil-N180-p98-chv12x15")),
    row(5, "evil-N184-p98-myc23x8", S, 184, 1764, Known::exact(16), 20.235, (20.235, 2.0), (20.235, 7.0), None, Source::File("evil-N184-p98-myc23x8")),

    row(6, "myciel5", C, 47, 236, Known::exact(6), 2.639, (3.093, 3.0), (3.468, 17.0), Some((3.510, 4240.0)), myciel(3)),
    row(6, "myciel6", C, 95, 755, Known::exact(7), 2.734, (3.253, 21.0), (3.622, 406.0), Some((3.534, 1540.0)), myciel(4)),
    row(6, "mug88_1", C, 88, 146, Known::exact(4), 3.000, (3.001, 3.0), (3.001, 1.0), Some((3.022, 4709.0)), Source::File("mug88_1")),
    row(6, "1_FullIns_4", C, 93, 593, Known::exact(5), 3.124, (3.487, 3.0), (3.837, 23.0), Some((3.939, 7220.0)), Source::File("1-FullIns_4")),
    row(6, "2_FullIns_4", C, 212, 1621, Known::exact(6), 4.056, (4.343, 4.0), (4.670, 17.0), Some((4.700, 10106.0)), Source::File("2-FullIns_4")),

    row(7, "dsjc125.1", C, 125, 736, Known::exact(5), 4.106, (4.218, 2.0), (4.430, 14.0), None, Source::File("dsjc125.1")),
    row(7, "dsjc250.1", C, 250, 3218, Known::exact(8), 4.906, (4.939, 12.0), (5.040, 457.0), None, Source::File("dsjc250.1")),
    row(7, "3_FullIns_3", C, 80, 346, Known::exact(6), 5.016, (5.194, 1.0), (5.194, 1.0), None, Source::File("3-FullIns_3")),
    row(7, "4_FullIns_3", C, 114, 541, Known::exact(7), 6.010, (6.010, 1.0), (6.309, 1.0), None, Source::File("4-FullIns_3")),
    row(7, "5_FullIns_3", C, 154, 792, Known::exact(8), 7.007, (7.007, 1.0), (7.267, 2.0), None, Source::File("5-FullIns_3")),
    row(7, "Queen_8_8", C, 64, 728, Known::exact(9), 8.000, (8.000, 1.0), (8.000, 7.0), None, queen(8)),
    row(7, "Queen_9_9", C, 81, 1056, Known::exact(10), 9.000, (9.000, 1.0), (9.000, 25.0), None, queen(9)),
    row(7, "Queen_10_10", C, 100, 1470, Known::exact(11), 10.000, (10.000, 1.0), (10.000, 62.0), None, queen(10)),
    row(7, "G100_25", C, 100, 1240, Known::unknown(), 5.823, (5.867, 2.0), (6.235, 76.0), None, Source::File("G100_25")),
    row(7, "G150_25", C, 150, 2802, Known::unknown(), 6.864, (6.918, 6.0), (7.184, 529.0), None, Source::File("G150_25")),
    row(7, "G200_1", C, 200, 2047, Known::unknown(), 4.447, (4.473, 10.0), (4.600, 178.0), None, Source::File("G200_1")),
    row(7, "G250_1", C, 250, 3149, Known::unknown(), 4.805, (4.831, 12.0), (4.928, 512.0), None, Source::File("G250_1")),
];

/// All rows in table order.
pub fn records() -> impl Iterator<Item = &'static ReferenceRecord> {
    RECORDS.iter()
}

/// Rows of one table, 1 through 7.
pub fn table(id: u8) -> Vec<&'static ReferenceRecord> {
    records().filter(|r| r.table == id).collect()
}

pub fn find(name: &str) -> Option<&'static ReferenceRecord> {
    records().find(|r| r.name.eq_ignore_ascii_case(name))
}

/// Stable text rendering of every row, pinned by a checksum test.
pub fn canonical_text() -> String {
    let mut out = String::new();
    for r in records() {
        let gr = match r.gr {
            Some((b, t)) => format!("{b:.3}/{t}"),
            None => "-".to_string(),
        };
        writeln!(
            out,
            "{}|{}|{}|{}|{}|{}|{:.3}|{:.3}/{}|{:.3}/{}|{}|{:?}",
            r.table,
            r.name,
            r.problem,
            r.n,
            r.m,
            r.known,
            r.theta,
            r.bound1,
            r.time1,
            r.bound2,
            r.time2,
            gr,
            r.source
        )
        .expect("write to string");
    }
    out
}
