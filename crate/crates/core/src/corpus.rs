//! Bundled example programs and bad-state patterns.

pub const CHALLENGE_RESPONSE: &str = include_str!("../../../corpus/challenge_response.tdl");
pub const CHALLENGE_RESPONSE_BUGGY: &str =
    include_str!("../../../corpus/challenge_response_buggy.tdl");
pub const NO_RESTART: &str = include_str!("../../../corpus/challenge_response_no_restart.tdl");
pub const S_U: &str = include_str!("../../../corpus/s_u.spec");
pub const TWO_COUNTER_MACHINE: &str = include_str!("../../../corpus/two_counter_machine.tdl");
pub const MUTEX: &str = include_str!("../../../corpus/mutex.tdl");
pub const MUTEX_UNSAFE: &str = include_str!("../../../corpus/mutex.spec");
pub const SESSIONS: &str = include_str!("../../../corpus/sessions.tdl");
pub const SESSIONS_UNSAFE: &str = include_str!("../../../corpus/sessions.spec");

/// Every bundled program by file name.
pub const PROGRAMS: &[(&str, &str)] = &[
    ("challenge_response.tdl", CHALLENGE_RESPONSE),
    ("challenge_response_buggy.tdl", CHALLENGE_RESPONSE_BUGGY),
    ("challenge_response_no_restart.tdl", NO_RESTART),
    ("two_counter_machine.tdl", TWO_COUNTER_MACHINE),
    ("mutex.tdl", MUTEX),
    ("sessions.tdl", SESSIONS),
];

/// Programs with single-local threads and single-variable templates, with
/// their bad-state patterns.
pub const MONADIC: &[(&str, &str, &str)] = &[
    ("mutex.tdl", MUTEX, MUTEX_UNSAFE),
    ("sessions.tdl", SESSIONS, SESSIONS_UNSAFE),
];
