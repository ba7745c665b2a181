//! The 15-tuple, 3-dimensional worked example shared by all builder tests.

use crate::tuple::Dataset;

/// The canonical 15-tuple dataset, by address 0..14.
///
/// Sorting by x:y:z yields median (7,2,6) at address 5; the two 7-element
/// halves have y:z:x medians (5,4,2) and (9,5,3); the four 3-element
/// quarters have z:x:y medians (2,1,3), (1,6,8), (8,3,2), (9,6,7).
pub fn golden_fixture() -> Dataset {
    #[rustfmt::skip]
    let coords = vec![
        2, 3, 4,
        5, 4, 2,
        9, 6, 7,
        4, 7, 9,
        8, 1, 5,
        7, 2, 6,
        9, 4, 1,
        8, 3, 2,
        9, 7, 8,
        6, 3, 2,
        3, 4, 5,
        1, 6, 8,
        9, 5, 3,
        2, 1, 3,
        8, 7, 5,
    ];
    Dataset::from_flat(coords, 3).expect("fixture is well-formed")
}
