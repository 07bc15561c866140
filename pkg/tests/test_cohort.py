import datetime as dt

from hypothesis import given
from hypothesis import strategies as st

from adrscan.cohort import AssignStats, assign_events, build_cohort
from adrscan.ingest import EventRecord, PrescriptionRecord
from adrscan.readcode import parse_code

D = dt.date.fromisoformat


def enumerate_window(start: dt.date, count: int, step: int) -> list[dt.date]:
    """Walk the calendar one day at a time; independent of timedelta(days=n)."""
    days, cur = [], start
    for _ in range(count):
        cur = cur + dt.timedelta(days=step)
        days.append(cur)
    return days


def test_build_cohort_windows():
    rx = [PrescriptionRecord("p", "X", D("2009-05-10")), PrescriptionRecord("p", "X", D("2009-08-01"))]
    [w] = build_cohort(rx, 60)
    assert w.index_date == D("2009-05-10")
    assert (w.before_start, w.before_end) == (D("2009-03-11"), D("2009-05-09"))
    assert (w.after_start, w.after_end) == (D("2009-05-11"), D("2009-07-09"))
    before = enumerate_window(w.index_date, 60, -1)
    after = enumerate_window(w.index_date, 60, +1)
    assert min(before) == w.before_start and max(before) == w.before_end
    assert min(after) == w.after_start and max(after) == w.after_end


def test_single_prescription_and_degenerate_window():
    [w] = build_cohort([PrescriptionRecord("p", "X", D("2010-01-01"))], 1)
    assert w.index_date == D("2010-01-01")
    assert w.before_start == w.before_end == D("2009-12-31")
    assert w.after_start == w.after_end == D("2010-01-02")


def test_cohort_order_and_earliest_index():
    rx = [
        PrescriptionRecord("b", "X", D("2010-03-01")),
        PrescriptionRecord("a", "X", D("2010-05-01")),
        PrescriptionRecord("b", "X", D("2010-01-01")),
    ]
    cohort = build_cohort(rx)
    assert [w.patient_id for w in cohort] == ["b", "a"]
    assert cohort[0].index_date == D("2010-01-01")
    assert build_cohort([]) == []


def test_cohort_restricted_to_known_patients():
    rx = [PrescriptionRecord("a", "X", D("2010-05-01")), PrescriptionRecord("z", "X", D("2010-05-01"))]
    assert [w.patient_id for w in build_cohort(rx, 60, ["a"])] == ["a"]


def _ev(pid, code, date):
    return EventRecord(pid, parse_code(code), date)


def test_assign_boundaries():
    [w] = build_cohort([PrescriptionRecord("p", "X", D("2009-05-10"))], 60)
    idx = w.index_date
    events = [
        _ev("p", "A", idx),
        _ev("p", "B", w.before_start),
        _ev("p", "C", w.before_start - dt.timedelta(days=1)),
        _ev("p", "D", w.after_end),
        _ev("p", "E", idx + dt.timedelta(days=61)),
        _ev("p", "F", idx - dt.timedelta(days=1)),
        _ev("q", "G", idx),
    ]
    stats = AssignStats()
    before, after = assign_events([w], events, stats)
    assert [c.raw for _, c in before] == ["B", "F"]
    assert [c.raw for _, c in after] == ["D"]
    assert stats.outside_window == 3
    assert stats.non_cohort == 1


@given(
    st.integers(1, 90),
    st.integers(-20000, 20000),
    st.lists(st.integers(-200, 200), min_size=1, max_size=30),
)
def test_partition_and_shift_invariance(window, shift, offsets):
    base = D("2010-06-15")
    shifted = base + dt.timedelta(days=shift)

    def run(index):
        cohort = build_cohort([PrescriptionRecord("p", "X", index)], window)
        events = [_ev("p", f"C{i}", index + dt.timedelta(days=o)) for i, o in enumerate(offsets)]
        stats = AssignStats()
        b, a = assign_events(cohort, events, stats)
        return [c.raw for _, c in b], [c.raw for _, c in a], stats

    b1, a1, s1 = run(base)
    b2, a2, _ = run(shifted)
    assert (b1, a1) == (b2, a2)
    assert s1.before + s1.after + s1.outside_window == len(offsets)
    assert not set(b1) & set(a1)
    for i, o in enumerate(offsets):
        tag = f"C{i}"
        assert (tag in b1) == (-window <= o <= -1)
        assert (tag in a1) == (1 <= o <= window)


def test_per_patient_determinism():
    rx = [PrescriptionRecord("p", "X", D("2010-01-10")), PrescriptionRecord("q", "X", D("2010-03-10"))]
    ev_p = [_ev("p", "A", D("2010-01-05")), _ev("p", "B", D("2010-01-20"))]
    ev_q = [_ev("q", "C", D("2010-03-01"))]
    alone = assign_events(build_cohort(rx[:1]), ev_p)
    together = assign_events(build_cohort(rx), ev_q + ev_p)
    assert [x for x in together[0] if x[0] == "p"] == alone[0]
    assert [x for x in together[1] if x[0] == "p"] == alone[1]
