//! Published error tables, embedded for `--compare paper`.
//!
//! Each row holds the six metrics in table order (see
//! [`METRIC_NAMES`](crate::postprocess::METRIC_NAMES)). For the Kellogg
//! case the first column is the refinement level instead of `h`.

use crate::postprocess::NUM_METRICS;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReferenceTable {
    pub case: &'static str,
    pub rows: &'static [(f64, [f64; NUM_METRICS])],
    pub rates: [f64; NUM_METRICS],
}

/// The published table for a case id, if there is one.
pub fn reference_for(case: &str) -> Option<&'static ReferenceTable> {
    ALL.iter().copied().find(|t| t.case == case)
}

pub const ALL: [&ReferenceTable; 10] = [
    &TABLE_1A, &TABLE_1B, &TABLE_1C, &TABLE_2, &TABLE_3A, &TABLE_3B, &TABLE_4, &TABLE_5A,
    &TABLE_5B, &TABLE_6,
];

pub const TABLE_1A: ReferenceTable = ReferenceTable {
    case: "1a",
    rows: &[
        (1.0 / 8.0, [0.714, 0.0216, 0.0405, 1.01, 0.13, 0.0443]),
        (1.0 / 16.0, [0.356, 0.00561, 0.0101, 0.504, 0.0653, 0.0112]),
        (
            1.0 / 32.0,
            [0.178, 0.00141, 0.00253, 0.251, 0.0327, 0.00286],
        ),
        (
            1.0 / 64.0,
            [0.089, 0.000355, 0.000632, 0.125, 0.0163, 0.000715],
        ),
        (
            1.0 / 128.0,
            [0.0445, 8.88e-05, 0.000157, 0.0629, 0.00818, 0.000179],
        ),
    ],
    rates: [1.0012, 1.9837, 2.0014, 1.0024, 0.9984, 1.9879],
};

pub const TABLE_1B: ReferenceTable = ReferenceTable {
    case: "1b",
    rows: &[
        (1.0 / 8.0, [0.71, 0.0175, 0.0308, 1.01, 0.129, 0.0368]),
        (
            1.0 / 16.0,
            [0.355, 0.00459, 0.00769, 0.504, 0.0652, 0.00954],
        ),
        (
            1.0 / 32.0,
            [0.178, 0.00116, 0.00192, 0.251, 0.0327, 0.00239],
        ),
        (
            1.0 / 64.0,
            [0.089, 0.00029, 0.000481, 0.125, 0.0163, 0.000601],
        ),
        (
            1.0 / 128.0,
            [0.0445, 7.27e-05, 0.00012, 0.0629, 0.00818, 0.00015],
        ),
    ],
    rates: [0.9993, 1.9808, 1.9999, 1.0015, 0.9968, 1.9861],
};

pub const TABLE_1C: ReferenceTable = ReferenceTable {
    case: "1c",
    rows: &[
        (1.0 / 8.0, [0.155, 0.00318, 0.0114, 0.195, 0.0451, 0.0112]),
        (
            1.0 / 16.0,
            [0.0787, 0.00082, 0.0029, 0.0982, 0.0225, 0.00318],
        ),
        (
            1.0 / 32.0,
            [0.0394, 0.000206, 0.000729, 0.0492, 0.0112, 0.00084],
        ),
        (
            1.0 / 64.0,
            [0.0197, 5.17e-05, 0.000182, 0.0246, 0.00564, 0.000215],
        ),
        (
            1.0 / 128.0,
            [0.00987, 1.29e-05, 4.56e-05, 0.0123, 0.00282, 5.46e-05],
        ),
    ],
    rates: [0.9958, 1.9876, 1.9926, 0.9971, 1.0001, 1.9262],
};

pub const TABLE_2: ReferenceTable = ReferenceTable {
    case: "2",
    rows: &[
        (
            1.0 / 8.0,
            [0.0561, 0.00332, 0.0066, 0.0575, 0.00548, 0.0127],
        ),
        (
            1.0 / 16.0,
            [0.0403, 0.00138, 0.00281, 0.0409, 0.00259, 0.0049],
        ),
        (
            1.0 / 32.0,
            [0.0295, 0.000568, 0.00116, 0.0296, 0.00123, 0.00221],
        ),
        (
            1.0 / 64.0,
            [0.0215, 0.000235, 0.000483, 0.0215, 0.000597, 0.00116],
        ),
        (
            1.0 / 128.0,
            [0.0155, 9.93e-05, 0.000202, 0.0155, 0.000291, 0.000599],
        ),
    ],
    rates: [0.4614, 1.2687, 1.2594, 0.4697, 1.0579, 1.0912],
};

pub const TABLE_3A: ReferenceTable = ReferenceTable {
    case: "3a",
    rows: &[
        (1.0 / 8.0, [0.188, 0.0064, 0.0147, 0.254, 0.0149, 0.043]),
        (1.0 / 16.0, [0.136, 0.0022, 0.00528, 0.184, 0.00766, 0.0301]),
        (
            1.0 / 32.0,
            [0.0974, 0.000762, 0.00186, 0.132, 0.00389, 0.0212],
        ),
        (
            1.0 / 64.0,
            [0.0693, 0.000265, 0.000657, 0.0942, 0.00196, 0.0149],
        ),
        (
            1.0 / 128.0,
            [0.0492, 9.33e-05, 0.000232, 0.0669, 0.000988, 0.0105],
        ),
    ],
    rates: [0.4852, 1.5251, 1.4992, 0.4827, 0.9805, 0.5066],
};

pub const TABLE_3B: ReferenceTable = ReferenceTable {
    case: "3b",
    rows: &[
        (1.0 / 8.0, [0.493, 0.0169, 0.0358, 0.665, 0.0256, 0.125]),
        (1.0 / 16.0, [0.418, 0.00707, 0.0152, 0.566, 0.0131, 0.105]),
        (
            1.0 / 32.0,
            [0.353, 0.00294, 0.00639, 0.479, 0.00672, 0.0885],
        ),
        (
            1.0 / 64.0,
            [0.298, 0.00122, 0.00268, 0.404, 0.00342, 0.0744],
        ),
        (
            1.0 / 128.0,
            [0.251, 0.000514, 0.00112, 0.34, 0.00173, 0.0625],
        ),
    ],
    rates: [0.2437, 1.2613, 1.2489, 0.2417, 0.9717, 0.2505],
};

pub const TABLE_4: ReferenceTable = ReferenceTable {
    case: "4",
    rows: &[
        (0.0, [0.107, 0.00397, 0.00995, 0.147, 0.026, 0.0197]),
        (1.0, [0.0976, 0.00292, 0.00644, 0.126, 0.0133, 0.0194]),
        (2.0, [0.093, 0.00251, 0.00511, 0.116, 0.00701, 0.0191]),
        (3.0, [0.0912, 0.00221, 0.00444, 0.111, 0.00395, 0.0188]),
        (4.0, [0.0898, 0.00195, 0.00391, 0.107, 0.00255, 0.0184]),
    ],
    rates: [0.0604, 0.2446, 0.3229, 0.1084, 0.8461, 0.0239],
};

/// Fitted rates over five nested levels for initial meshes refined
/// progressively closer to the origin, keyed by initial triangle count.
pub const KELLOGG_TREND: &[(usize, [f64; NUM_METRICS])] = &[
    (268, [0.0604, 0.2446, 0.3229, 0.1084, 0.8461, 0.0239]),
    (300, [0.075, 0.2623, 0.3489, 0.1206, 0.8699, 0.0373]),
    (332, [0.0888, 0.2818, 0.3772, 0.1329, 0.8912, 0.0487]),
    (364, [0.102, 0.3031, 0.4079, 0.1454, 0.9099, 0.0586]),
    (396, [0.1148, 0.3266, 0.4411, 0.1581, 0.926, 0.0673]),
    (428, [0.1273, 0.3522, 0.4766, 0.1711, 0.9396, 0.0749]),
    (460, [0.1396, 0.3802, 0.5145, 0.1843, 0.9509, 0.0817]),
    (492, [0.1519, 0.4105, 0.5548, 0.1978, 0.9602, 0.0878]),
    (524, [0.1641, 0.4432, 0.5972, 0.2117, 0.9678, 0.0932]),
];

pub const TABLE_5A: ReferenceTable = ReferenceTable {
    case: "5a",
    rows: &[
        (1.0 / 8.0, [1.48, 0.0195, 0.0461, 2.7, 0.129, 0.0413]),
        (1.0 / 16.0, [0.739, 0.00511, 0.0116, 1.35, 0.0653, 0.0106]),
        (1.0 / 32.0, [0.369, 0.00129, 0.00292, 0.68, 0.0327, 0.00267]),
        (
            1.0 / 64.0,
            [0.184, 0.000324, 0.000733, 0.34, 0.0163, 0.000668],
        ),
        (
            1.0 / 128.0,
            [0.0923, 8.12e-05, 0.000183, 0.17, 0.00818, 0.000166],
        ),
    ],
    rates: [1.001, 1.9793, 1.9942, 0.9972, 0.9975, 1.9906],
};

pub const TABLE_5B: ReferenceTable = ReferenceTable {
    case: "5b",
    rows: &[
        (1.0 / 4.0, [7.98, 0.068, 0.293, 15.8, 0.252, 0.149]),
        (1.0 / 8.0, [3.89, 0.0207, 0.0744, 8.18, 0.13, 0.0422]),
        (1.0 / 16.0, [1.91, 0.00543, 0.0188, 4.12, 0.0653, 0.0109]),
        (1.0 / 32.0, [0.954, 0.00137, 0.00472, 2.06, 0.0327, 0.00274]),
        (
            1.0 / 64.0,
            [0.476, 0.000344, 0.00118, 1.03, 0.0163, 0.000684],
        ),
    ],
    rates: [1.0161, 1.916, 1.9897, 0.9857, 0.9883, 1.9492],
};

pub const TABLE_6: ReferenceTable = ReferenceTable {
    case: "6",
    rows: &[
        (1.0 / 8.0, [0.185, 0.0162, 0.0427, 1.22, 0.134, 0.0363]),
        (1.0 / 12.0, [0.0853, 0.00769, 0.0194, 0.819, 0.0914, 0.0196]),
        (1.0 / 16.0, [0.0486, 0.00442, 0.011, 0.615, 0.0689, 0.0118]),
        (
            1.0 / 20.0,
            [0.0313, 0.00285, 0.00707, 0.492, 0.0552, 0.00778],
        ),
    ],
    rates: [1.9389, 1.8984, 1.9618, 0.9914, 0.9737, 1.6779],
};
