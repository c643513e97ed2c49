import time

import pytest

from ionjump.errors import MissingIon
from ionjump.tables import PUBLISHED, TOLERANCE, Table, reproduce_table

# Regression pins for every computed cell (ion-major, eta = 1 then 0.01).
# The four Hg+ cells of T2/T3 are known to disagree with the published
# values — the source tabulation is internally inconsistent there — and
# are pinned at their honestly computed numbers.
COMPUTED = {
    Table.T1: [7.142432977135696, 2.258635624284614, 4.9315091139425675,
               1.5594801101937341, 13.206946442106085, 4.176403169291233,
               14.20121931032422, 14.20121931032422],
    Table.T2: [14.785501357287824, 3.966500232229873, 9.791104802088567,
               2.626655568370613, 23.60757377220903, 6.333193889546111,
               25.725435712194823, 25.725435712194823],
    Table.T3: [14.933269638428484, 3.6205145029218615, 7.936949382670604,
               1.9242832309789912, 20.79804668793091, 5.042407422439341,
               31.795089444480038, 31.795089444480038],
    Table.T4: [34.06772045279241, 6.3836688141579465, 16.14107487372077,
               3.0245427322071947, 50.39279767413282, 9.442690226846832,
               71.99451251699202, 71.99451251699202],
}

EXPECTED_OUT_OF_TOLERANCE = {
    Table.T1: set(),
    Table.T2: {("Hg+", 1.0), ("Hg+", 0.01)},
    Table.T3: {("Hg+", 1.0), ("Hg+", 0.01)},
    Table.T4: set(),
}


@pytest.mark.parametrize("table", list(Table))
def test_table_regression_values(db, table):
    result = reproduce_table(table, db)
    for cell, frozen in zip(result.cells, COMPUTED[table]):
        assert cell.computed == pytest.approx(frozen, rel=1e-12)


@pytest.mark.parametrize("table", list(Table))
def test_table_tolerance_status(db, table):
    result = reproduce_table(table, db)
    failing = {(c.ion, c.eta) for c in result.failing_cells()}
    assert failing == EXPECTED_OUT_OF_TOLERANCE[table]
    for cell in result.cells:
        assert cell.published == PUBLISHED[table][cell.ion][0 if cell.eta == 1.0 else 1]
        assert cell.rel_deviation == pytest.approx(
            (cell.computed - cell.published) / cell.published)


@pytest.mark.parametrize("table", list(Table))
def test_table_runtime(db, table):
    start = time.perf_counter()
    reproduce_table(table, db)
    assert time.perf_counter() - start < 1.0


def test_tolerances_are_pinned():
    assert TOLERANCE == {Table.T1: 0.10, Table.T2: 0.10,
                         Table.T3: 0.15, Table.T4: 0.50}


def test_missing_ion_is_reported(db):
    import dataclasses

    smaller = dataclasses.replace(db, ions={"Ca+": db.get("Ca+")})
    with pytest.raises(MissingIon):
        reproduce_table(Table.T1, smaller)


def test_table_from_string():
    assert Table.from_string("t2") is Table.T2
    with pytest.raises(ValueError):
        Table.from_string("T9")
