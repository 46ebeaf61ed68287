//! The fixture problems shipped with the repository, embedded so that the
//! self-test subcommand works from any directory.

pub const FIXTURES: &[(&str, &str)] = &[
    ("triangle", include_str!("../../../fixtures/triangle.mop")),
    ("degenerate", include_str!("../../../fixtures/degenerate.mop")),
    ("cross", include_str!("../../../fixtures/cross.mop")),
    ("four-triangle", include_str!("../../../fixtures/four-triangle.mop")),
    ("square", include_str!("../../../fixtures/square.mop")),
    ("mixed-powers", include_str!("../../../fixtures/mixed-powers.mop")),
    ("irregular", include_str!("../../../fixtures/irregular.mop")),
    ("disconnected", include_str!("../../../fixtures/disconnected.mop")),
    ("isolated-points", include_str!("../../../fixtures/isolated-points.mop")),
];

pub fn by_name(name: &str) -> Option<&'static str> {
    FIXTURES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}
