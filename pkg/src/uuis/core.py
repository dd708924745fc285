"""Permission-signature algebra and the affiliation hierarchy.

A permission signature is a 16-bit mask stored widened to an int. Capability
bits live in positions 0..11, three per level (0-2 level 0, 3-5 level 1,
6-8 level 2, 9-11 level 3); positions 12..15 are reserved and must stay
clear. A signature's level is the highest populated group, and the level
decides how far the holder's reach extends across the university ->
faculty -> department tree.

Everything here is a pure function over immutable values; safe for
concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable

from .errors import ServiceError, not_found

SIGNATURE_BITS = 16
MAX_SIGNATURE = (1 << SIGNATURE_BITS) - 1
RESERVED_MASK = 0xF000          # bits 12..15 never issued
USABLE_MASK = 0x0FFF

# Capability used by error management ("IT Group" carries it in seed data).
SYSADMIN_BIT = 2048

UNIVERSITY_ID = 0


class Level(IntEnum):
    """Permission rank; total order L0 < L1 < L2 < L3."""

    L0 = 0
    L1 = 1
    L2 = 2
    L3 = 3


# Mask of the three capability bits backing each level.
LEVEL_GROUP_MASKS = {
    Level.L0: 0b000000000111,
    Level.L1: 0b000000111000,
    Level.L2: 0b000111000000,
    Level.L3: 0b111000000000,
}


def validate_signature(sig: int) -> int:
    if not isinstance(sig, int) or sig < 0 or sig > MAX_SIGNATURE:
        raise ServiceError("invalid-signature", f"signature out of range: {sig!r}")
    if sig & RESERVED_MASK:
        raise ServiceError("invalid-signature",
                           f"reserved bits 12..15 set in signature {sig:#06x}")
    return sig


def level_of(sig: int) -> Level:
    """Level of a signature: the highest populated 3-bit group, L0 if none."""
    validate_signature(sig)
    for level in (Level.L3, Level.L2, Level.L1):
        if sig & LEVEL_GROUP_MASKS[level]:
            return level
    return Level.L0


def grants(sig: int, bit: int) -> bool:
    """True iff the single capability `bit` is present in `sig`."""
    validate_signature(sig)
    if bit <= 0 or bit & (bit - 1):
        raise ServiceError("invalid-argument",
                           f"capability must be a single bit, got {bit!r}")
    if bit > MAX_SIGNATURE:
        raise ServiceError("invalid-argument", f"capability bit out of range: {bit!r}")
    return (sig & bit) != 0


KIND_UNIVERSITY = "university"
KIND_FACULTY = "faculty"
KIND_DEPARTMENT = "department"


@dataclass(frozen=True)
class Affiliation:
    """Node in the university -> faculty -> department tree.

    parent_id is None for the university root, UNIVERSITY_ID for faculties
    and the owning faculty id for departments.
    """

    affln_id: int
    name: str
    code: str
    parent_id: int | None

    @property
    def kind(self) -> str:
        if self.parent_id is None:
            return KIND_UNIVERSITY
        if self.parent_id == UNIVERSITY_ID:
            return KIND_FACULTY
        return KIND_DEPARTMENT


class AffiliationDirectory:
    """Lookup structure over the known affiliations."""

    def __init__(self, affiliations: Iterable[Affiliation]):
        self._by_id = {a.affln_id: a for a in affiliations}

    def __contains__(self, affln_id: int) -> bool:
        return affln_id in self._by_id

    def ids(self) -> frozenset[int]:
        return frozenset(self._by_id)

    def all(self) -> list[Affiliation]:
        return sorted(self._by_id.values(), key=lambda a: a.affln_id)

    def get(self, affln_id: int) -> Affiliation:
        try:
            return self._by_id[affln_id]
        except KeyError:
            raise not_found(f"affiliation {affln_id}") from None

    def parent_faculty(self, dept_id: int) -> int:
        """Owning faculty of a department; rejects non-department input."""
        affln = self.get(dept_id)
        if affln.kind != KIND_DEPARTMENT:
            raise ServiceError("invalid-argument",
                               f"affiliation {dept_id} is a {affln.kind}, not a department")
        return affln.parent_id  # type: ignore[return-value]

    def departments_of(self, faculty_id: int) -> frozenset[int]:
        return frozenset(a.affln_id for a in self._by_id.values()
                         if a.parent_id == faculty_id and a.affln_id != UNIVERSITY_ID)


SCOPE_UNIVERSITY = "university"
SCOPE_FACULTY = "faculty"
SCOPE_DEPARTMENT = "department"


@dataclass(frozen=True)
class Scope:
    """Reach of a session: one department, one faculty subtree, or everything."""

    kind: str
    affln_id: int | None = None

    def member_ids(self, directory: AffiliationDirectory) -> frozenset[int]:
        """Affiliation ids the scope contains (resolved against `directory`)."""
        if self.kind == SCOPE_UNIVERSITY:
            return directory.ids()
        if self.kind == SCOPE_FACULTY:
            return directory.departments_of(self.affln_id) | {self.affln_id}
        return frozenset({self.affln_id})

    def describe(self, directory: AffiliationDirectory) -> str:
        if self.kind == SCOPE_UNIVERSITY:
            return "university-wide"
        node = directory.get(self.affln_id)
        return f"{self.kind} {node.name}"


def scope_of(level: Level, affln: Affiliation, directory: AffiliationDirectory) -> Scope:
    """Scope granted to a role of `level` attached at `affln`.

    L3 is university-wide regardless of attachment. L2 covers the enclosing
    faculty. L1 covers the department, widening to the faculty node set only
    when the role is attached at faculty level. A sub-L3 role attached at the
    university root collapses to just that node (no broad grant by accident).
    """
    if affln.affln_id not in directory:
        raise not_found(f"affiliation {affln.affln_id}")
    if level == Level.L3:
        return Scope(SCOPE_UNIVERSITY)
    if affln.kind == KIND_UNIVERSITY:
        return Scope(SCOPE_DEPARTMENT, affln.affln_id)
    if level == Level.L2:
        faculty = affln.affln_id if affln.kind == KIND_FACULTY else affln.parent_id
        return Scope(SCOPE_FACULTY, faculty)
    # L0 and L1: own node; faculty attachment keeps the faculty subtree.
    if affln.kind == KIND_FACULTY:
        return Scope(SCOPE_FACULTY, affln.affln_id)
    return Scope(SCOPE_DEPARTMENT, affln.affln_id)


def within_scope(scope: Scope, target_affln_id: int,
                 directory: AffiliationDirectory) -> bool:
    """Membership of an affiliation in a scope."""
    directory.get(target_affln_id)
    return target_affln_id in scope.member_ids(directory)


@dataclass(frozen=True)
class ResolvedRole:
    """A user role with its effective signature already derived.

    The effective signature is the acls override for the role when one
    exists, else the professional title's default permission.
    """

    user_role_id: int
    user_id: int
    title_id: int
    affln_id: int
    status: str | None
    signature: int

    @property
    def level(self) -> Level:
        return level_of(self.signature)


def may_administer(actor: ResolvedRole, target: ResolvedRole,
                   directory: AffiliationDirectory) -> bool:
    """Whether `actor` outranks `target` within reach.

    Strictly greater level and the target's affiliation inside the actor's
    scope; never true for equal levels, hence irreflexive.
    """
    if actor.level <= target.level:
        return False
    scope = scope_of(actor.level, directory.get(actor.affln_id), directory)
    return within_scope(scope, target.affln_id, directory)
