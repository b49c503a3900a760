//! Wildly ramified entries: quadratic extensions of Q_2 and cubic
//! extensions of Q_3.

use super::{ramified, ExtensionField};

pub(super) fn quadratic_2() -> Vec<ExtensionField> {
    vec![
        ramified(2, vec![2, 2, 1], 2, 2, 1),
        ramified(2, vec![-2, 2, 1], 2, 2, 2),
        ramified(2, vec![-2, 0, 1], 3, 2, 1),
        ramified(2, vec![2, 0, 1], 3, 2, 2),
        ramified(2, vec![-10, 0, 1], 3, 2, 3),
        ramified(2, vec![10, 0, 1], 3, 2, 4),
    ]
}

pub(super) fn cubic_3() -> Vec<ExtensionField> {
    vec![
        ramified(3, vec![3, -6, -6, 1], 3, 1, 1),
        ramified(3, vec![3, -3, -6, 1], 3, 1, 2),
        ramified(3, vec![3, 0, -6, 1], 4, 1, 1),
        ramified(3, vec![3, 0, -3, 1], 4, 3, 2),
        ramified(3, vec![6, 0, -6, 1], 4, 3, 3),
        ramified(3, vec![12, 0, -3, 1], 4, 3, 4),
        ramified(3, vec![3, 0, 0, 1], 5, 1, 1),
        ramified(3, vec![6, 0, 0, 1], 5, 1, 2),
        ramified(3, vec![12, 0, 0, 1], 5, 1, 3),
    ]
}
