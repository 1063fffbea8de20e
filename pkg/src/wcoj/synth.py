"""Synthetic triple generators: a mini university ontology, an adversarial
triangle family, and uniform noise.

All three are deterministic in (kind, n, seed): same arguments, same bytes.

The university generator (``lubm_like``) lays out departments under
universities with faculty, courses, students, research groups, and
publications, shaped so that the whole benchmark-style query corpus in
queries/ is non-trivially satisfiable at any scale: Department0.University0,
its AssociateProfessor0 / AssistantProfessor0 / GraduateCourse0, and
University1 all exist by construction, the first graduate student of each
department closes the degree/membership triangle, and undergraduates are a
small slice of the typed entities so constant-probe orderings have something
to skip.

The adversarial family gives each of three predicates the tuples
{(s_i, hub)} + {(hub, t_j)} with i, j < n/2: any pairwise plan for the
triangle query materializes (n/2)^2 tuples on its first join, while the
multiway engine touches the hub and stops.
"""

from __future__ import annotations

import random

UB = "http://www.lehigh.edu/~zhp2/2004/0401/univ-bench.owl#"
RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"

_FACULTY_KINDS = (
    ("FullProfessor", 2),
    ("AssociateProfessor", 2),
    ("AssistantProfessor", 2),
)
_COURSES_PER_DEPT = 6          # plus the same number of graduate courses
_UNDERGRADS_PER_DEPT = 4
_GRADS_PER_DEPT = 3
_GROUPS_PER_DEPT = 2
_PUBS_PER_FACULTY = 5
_TRIPLES_PER_DEPT = 172        # empirical; only scales the department count


def generate_synthetic(kind: str, n: int, seed: int) -> str:
    if n < 1:
        if kind == "uniform_random":
            return ""
        raise ValueError("scale must be >= 1")
    if kind == "lubm_like":
        return _university(n, seed)
    if kind == "adversarial_triangle":
        return _adversarial(n)
    if kind == "uniform_random":
        return _uniform(n, seed)
    raise ValueError(f"unknown generator kind {kind!r}")


def _adversarial(n: int) -> str:
    half = n // 2
    out = []
    for pred in ("p", "q", "r"):
        out.extend(f"s{i}\t{pred}\thub\n" for i in range(half))
        out.extend(f"hub\t{pred}\tt{j}\n" for j in range(half))
    return "".join(out)


def _uniform(n: int, seed: int) -> str:
    rng = random.Random(seed)
    vocab = max(4, int(n**0.5))
    preds = ("p0", "p1", "p2", "p3")
    return "".join(
        f"e{rng.randrange(vocab)}\t{rng.choice(preds)}\te{rng.randrange(vocab)}\n"
        for _ in range(n)
    )


class _Emit:
    def __init__(self) -> None:
        self.lines: list[str] = []

    def triple(self, s: str, p: str, o: str) -> None:
        self.lines.append(f"<{s}> <{p}> <{o}> .\n")

    def literal(self, s: str, p: str, o: str) -> None:
        self.lines.append(f'<{s}> <{p}> "{o}" .\n')

    def typed(self, s: str, kind: str) -> None:
        self.triple(s, RDF_TYPE, UB + kind)


def _university(n: int, seed: int) -> str:
    rng = random.Random(seed)
    n_depts = max(2, n // _TRIPLES_PER_DEPT)
    n_univs = max(2, (n_depts + 3) // 4)
    univs = [f"http://www.University{m}.edu" for m in range(n_univs)]
    e = _Emit()
    for u in univs:
        e.typed(u, "University")

    for d in range(n_depts):
        m = d % n_univs
        k = d // n_univs
        univ = univs[m]
        dept = f"http://www.Department{k}.University{m}.edu"
        e.typed(dept, "Department")
        e.triple(dept, UB + "subOrganizationOf", univ)

        faculty: list[tuple[str, str]] = []
        for kind, count in _FACULTY_KINDS:
            for j in range(count):
                faculty.append((f"{dept}/{kind}{j}", kind))
        courses = [f"{dept}/Course{j}" for j in range(_COURSES_PER_DEPT)]
        grad_courses = [f"{dept}/GraduateCourse{j}" for j in range(_COURSES_PER_DEPT)]
        for c in courses:
            e.typed(c, "Course")
        for c in grad_courses:
            e.typed(c, "GraduateCourse")

        for f, (person, kind) in enumerate(faculty):
            local = person.rsplit("/", 1)[1]
            e.typed(person, kind)
            e.triple(person, UB + "worksFor", dept)
            e.literal(person, UB + "name", local)
            e.literal(person, UB + "emailAddress", f"{local}@Department{k}.University{m}.edu")
            e.literal(person, UB + "telephone", f"555-{d}-{f}")
            e.triple(person, UB + "undergraduateDegreeFrom", rng.choice(univs))
            # Each teaches one course at each level; index f pairs a faculty
            # member with the courses the student scaffolding below relies on.
            e.triple(person, UB + "teacherOf", courses[f])
            e.triple(person, UB + "teacherOf", grad_courses[f])
            for pj in range(_PUBS_PER_FACULTY):
                pub = f"{person}/Publication{pj}"
                e.typed(pub, "Publication")
                e.triple(pub, UB + "publicationAuthor", person)

        assistants = [p for p, kind in faculty if kind == "AssistantProfessor"]
        for j in range(_UNDERGRADS_PER_DEPT):
            ug = f"{dept}/UndergraduateStudent{j}"
            e.typed(ug, "UndergraduateStudent")
            e.triple(ug, UB + "memberOf", dept)
            e.literal(ug, UB + "emailAddress", f"UndergraduateStudent{j}@Department{k}.University{m}.edu")
            if j == 0:
                # advisor teaches a taken course: keeps the student/advisor/
                # course triangle non-empty everywhere
                e.triple(ug, UB + "advisor", assistants[0])
                e.triple(ug, UB + "takesCourse", courses[4])
            elif j == 1:
                e.triple(ug, UB + "advisor", assistants[1])
                e.triple(ug, UB + "takesCourse", courses[2])
            elif rng.random() < 0.3:
                e.triple(ug, UB + "advisor", rng.choice(assistants))
            e.triple(ug, UB + "takesCourse", rng.choice(courses))

        for j in range(_GRADS_PER_DEPT):
            g = f"{dept}/GraduateStudent{j}"
            e.typed(g, "GraduateStudent")
            e.triple(g, UB + "memberOf", dept)
            e.literal(g, UB + "emailAddress", f"GraduateStudent{j}@Department{k}.University{m}.edu")
            if j == 0:
                degree = univs[1]
                e.triple(g, UB + "takesCourse", grad_courses[0])
            elif j == 1:
                degree = univ  # closes the member/subOrganization/degree triangle
                e.triple(g, UB + "takesCourse", rng.choice(grad_courses))
            else:
                degree = rng.choice(univs)
                e.triple(g, UB + "takesCourse", rng.choice(grad_courses))
            e.triple(g, UB + "undergraduateDegreeFrom", degree)
            e.triple(g, UB + "advisor", rng.choice(assistants))
            e.triple(g, UB + "takesCourse", rng.choice(grad_courses))
            pub = f"{g}/Publication0"
            e.typed(pub, "Publication")
            e.triple(pub, UB + "publicationAuthor", g)

        for j in range(_GROUPS_PER_DEPT):
            rg = f"{dept}/ResearchGroup{j}"
            e.typed(rg, "ResearchGroup")
            # half the groups sit directly under the university so the
            # group-under-university query has matches
            e.triple(rg, UB + "subOrganizationOf", dept if j % 2 == 0 else univ)

    return "".join(e.lines)
