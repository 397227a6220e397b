import math

import pytest

from hsmcast import cqi
from hsmcast.errors import TableError


def test_bundled_table_shape(table):
    assert len(table) == 30
    assert table.n_cqi == 30
    assert [e.cqi for e in table] == list(range(1, 31))


def test_known_rows(table):
    first = table.lookup(1)
    assert first.modulation is cqi.Modulation.QPSK
    assert first.transport_block_size == 137
    assert first.num_codes == 1
    assert first.data_rate_kbps == 68.5

    mid = table.lookup(16)
    assert mid.modulation is cqi.Modulation.QAM16
    assert mid.transport_block_size == 3565
    assert mid.num_codes == 5
    assert mid.data_rate_kbps == 1782.5

    top = table.lookup(30)
    assert top.transport_block_size == 25558
    assert top.num_codes == 15
    assert top.data_rate_kbps == 12779.0


def test_rate_identity_all_rows(table):
    for entry in table:
        assert abs(entry.data_rate_kbps - entry.transport_block_size / 2.0) <= cqi.RATE_TOL_KBPS


def test_code_rate_identity_all_rows(table):
    for entry in table:
        per_code = entry.transport_block_size / (
            entry.num_codes * entry.modulation.bits_per_code)
        assert abs(entry.code_rate - per_code) <= cqi.CODE_RATE_TOL


def test_monotonicity(table):
    rates = [e.data_rate_kbps for e in table]
    codes = [e.num_codes for e in table]
    assert all(b > a for a, b in zip(rates, rates[1:]))
    assert all(b >= a for a, b in zip(codes, codes[1:]))


def test_lookup_out_of_range(table):
    with pytest.raises(ValueError):
        table.lookup(0)
    with pytest.raises(ValueError):
        table.lookup(31)


def test_arrays_are_read_only(table):
    with pytest.raises(ValueError):
        table.rates[0] = 1.0
    with pytest.raises(ValueError):
        table.codes[0] = 2


def test_validate_rejects_rate_regression(table):
    entries = list(table)
    broken = entries[:7] + [cqi.CqiEntry(8, entries[7].modulation,
                                         entries[7].transport_block_size,
                                         entries[7].num_codes,
                                         entries[7].code_rate,
                                         entries[5].data_rate_kbps)] + entries[8:]
    report = cqi.validate(cqi.CqiTable(tuple(broken)))
    assert not report.ok
    assert any("increas" in p for p in report.problems)


def test_validate_rejects_code_drop(table):
    entries = list(table)
    e = entries[7]
    entries[7] = cqi.CqiEntry(e.cqi, e.modulation, e.transport_block_size,
                              1, e.code_rate, e.data_rate_kbps)
    report = cqi.validate(cqi.CqiTable(tuple(entries)))
    assert not report.ok


def test_load_rejects_missing_file(tmp_path):
    with pytest.raises(TableError):
        cqi.load_table(tmp_path / "absent.csv")


def test_load_rejects_empty_file(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(TableError):
        cqi.load_table(path)


def test_load_rejects_duplicate_level(tmp_path):
    path = tmp_path / "dup.csv"
    path.write_text(
        "cqi,modulation,tbs,codes,code_rate,data_rate_kbps\n"
        "1,QPSK,137,1,0.1427,68.5\n"
        "1,QPSK,173,1,0.1802,86.5\n"
    )
    with pytest.raises(TableError):
        cqi.load_table(path)


def test_load_reports_line_numbers(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text(
        "cqi,modulation,tbs,codes,code_rate,data_rate_kbps\n"
        "1,QPSK,137,1,0.1427,68.5\n"
        "2,QPSK,not_a_number,1,0.1802,86.5\n"
    )
    with pytest.raises(TableError) as err:
        cqi.load_table(path)
    assert ":3" in str(err.value)


def test_load_custom_prefix_table(tmp_path, table):
    rows = ["cqi,modulation,tbs,codes,code_rate,data_rate_kbps"]
    for e in list(table)[:5]:
        rows.append(f"{e.cqi},{e.modulation.value},{e.transport_block_size},"
                    f"{e.num_codes},{e.code_rate},{e.data_rate_kbps}")
    path = tmp_path / "five.csv"
    path.write_text("\n".join(rows) + "\n")
    small = cqi.load_table(path)
    assert small.n_cqi == 5
    assert math.isclose(small.rates[-1], 188.5)
