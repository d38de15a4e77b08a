//! Holds the `acceptance` test target; the checks live in `diolab::battery`.
