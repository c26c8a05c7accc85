"""Global numeric tolerances shared across the library.

There is one module-level record, POLICY.  Tests and callers that need
different knobs mutate or replace the fields; nothing else in the library
caches them.
"""

from dataclasses import dataclass


@dataclass
class NumericPolicy:
    construction_tol: float = 1e-9  # matrix and point validation at build time
    identity_tol: float = 1e-7     # derived identities (round trips, conjugation)
    dedup_tol: float = 1e-6        # orbit dedup, entrywise matrix distance
    pole_tol: float = 1e-14        # boundary evaluation pole guard
    overflow_tol: float = 1e-14    # interior images this close to the sphere overflow
    orbit_cap: int = 5_000_000     # enumeration resource limit, elements kept


POLICY = NumericPolicy()
