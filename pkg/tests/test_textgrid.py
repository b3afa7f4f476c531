import pytest
from hypothesis import given
from hypothesis import strategies as st

from phonodiverge.textgrid import (
    SILENCE,
    Interval,
    TextGridParseError,
    Tier,
    normalize_label,
    parse_textgrid,
    phone_intervals,
)

LONG_FIXTURE = """File type = "ooTextFile"
Object class = "TextGrid"

xmin = 0
xmax = 1
tiers? <exists>
size = 2
item []:
    item [1]:
        class = "IntervalTier"
        name = "phones"
        xmin = 0
        xmax = 1
        intervals: size = 3
        intervals [1]:
            xmin = 0
            xmax = 0.25
            text = "sil"
        intervals [2]:
            xmin = 0.25
            xmax = 0.5
            text = "AA1"
        intervals [3]:
            xmin = 0.5
            xmax = 1
            text = "T"
    item [2]:
        class = "IntervalTier"
        name = "words"
        xmin = 0
        xmax = 1
        intervals: size = 2
        intervals [1]:
            xmin = 0
            xmax = 0.5
            text = ""
        intervals [2]:
            xmin = 0.5
            xmax = 1
            text = "tea"
"""

SHORT_FIXTURE = """File type = "ooTextFile"
Object class = "TextGrid"

0
1
<exists>
1
"IntervalTier"
"phones"
0
1
3
0
0.25
"sil"
0.25
0.5
"AA1"
0.5
1
"T"
"""


class TestParse:
    def test_long_format(self):
        tiers = parse_textgrid(LONG_FIXTURE)
        assert [t.name for t in tiers] == ["phones", "words"]
        phones = tiers[0]
        assert len(phones.intervals) == 3
        assert phones.intervals[0] == Interval("sil", 0.0, 0.25)
        assert phones.intervals[1] == Interval("AA1", 0.25, 0.5)
        assert phones.intervals[2] == Interval("T", 0.5, 1.0)
        assert phones.tmin == 0.0 and phones.tmax == 1.0

    def test_short_format_matches_long(self):
        long_phones = parse_textgrid(LONG_FIXTURE)[0]
        short_phones = parse_textgrid(SHORT_FIXTURE)[0]
        assert short_phones == long_phones

    def test_empty_label_preserved(self):
        words = parse_textgrid(LONG_FIXTURE)[1]
        assert words.intervals[0].label == ""

    def test_utf16_bom_roundtrip(self):
        for enc, bom in (("utf-16-le", b"\xff\xfe"), ("utf-16-be", b"\xfe\xff")):
            data = bom + LONG_FIXTURE.encode(enc)
            assert parse_textgrid(data) == parse_textgrid(LONG_FIXTURE)

    def test_utf8_bom(self):
        data = b"\xef\xbb\xbf" + LONG_FIXTURE.encode("utf-8")
        assert parse_textgrid(data) == parse_textgrid(LONG_FIXTURE)

    def test_parse_deterministic(self):
        assert parse_textgrid(LONG_FIXTURE) == parse_textgrid(LONG_FIXTURE)

    def test_binary_rejected(self):
        with pytest.raises(TextGridParseError):
            parse_textgrid(b"ooBinaryFile\x00TextGrid\x00garbage")

    def test_quote_escape(self):
        text = SHORT_FIXTURE.replace('"AA1"', '"AA""1"')
        tiers = parse_textgrid(text)
        assert tiers[0].intervals[1].label == 'AA"1'

    def test_point_tier_skipped(self):
        text = """File type = "ooTextFile"
Object class = "TextGrid"

0
1
<exists>
2
"TextTier"
"tones"
0
1
2
0.3
"H*"
0.7
"L%"
"IntervalTier"
"phones"
0
1
1
0
1
"AA"
"""
        tiers = parse_textgrid(text)
        assert [t.name for t in tiers] == ["phones"]

    def test_absent_tiers(self):
        text = 'File type = "ooTextFile"\nObject class = "TextGrid"\n\n0\n1\n<absent>\n'
        assert parse_textgrid(text) == []

    def test_non_monotone_error_names_line(self):
        bad = LONG_FIXTURE.replace("xmin = 0.25", "xmin = 0.1", 1)
        # First replacement hits interval [2] of phones; overlap with [1].
        with pytest.raises(TextGridParseError, match=r"line \d+"):
            parse_textgrid(bad)

    def test_mismatched_count_error(self):
        bad = SHORT_FIXTURE.replace("\n3\n0\n0.25", "\n4\n0\n0.25")
        with pytest.raises(TextGridParseError):
            parse_textgrid(bad)

    def test_xmin_equal_xmax_rejected(self):
        bad = SHORT_FIXTURE.replace("0.25\n0.5", "0.25\n0.25", 1)
        with pytest.raises(TextGridParseError, match="xmin >= xmax"):
            parse_textgrid(bad)

    def test_not_a_textgrid(self):
        with pytest.raises(TextGridParseError):
            parse_textgrid('File type = "ooTextFile"\nObject class = "Sound"\n0\n1\n')

    def test_boundary_jitter_tolerated(self):
        text = SHORT_FIXTURE.replace("0.25\n0.5\n", "0.2499999999\n0.5\n", 1)
        tiers = parse_textgrid(text)
        assert len(tiers[0].intervals) == 3

    def test_monotone_invariant_on_fixtures(self):
        for fixture in (LONG_FIXTURE, SHORT_FIXTURE):
            for tier in parse_textgrid(fixture):
                for a, b in zip(tier.intervals, tier.intervals[1:]):
                    assert a.xmax <= b.xmin + 1e-6


class TestNormalize:
    def test_stress_digits_stripped(self):
        assert normalize_label("AA1") == "AA"
        assert normalize_label("AA0") == "AA"
        assert normalize_label("AA2") == "AA"

    def test_silence_labels(self):
        for raw in ("", "sil", "sp", "spn", "SIL", "Sp"):
            assert normalize_label(raw) == SILENCE

    def test_lowercase_uppercased(self):
        assert normalize_label("ao1") == "AO"

    def test_digits_only_is_silence(self):
        assert normalize_label("012") == SILENCE

    @given(st.text(max_size=12))
    def test_idempotent(self, raw):
        once = normalize_label(raw)
        assert normalize_label(once) == once

    @given(st.text(max_size=12))
    def test_never_ends_in_stress_digit(self, raw):
        out = normalize_label(raw)
        assert out == SILENCE or out[-1] not in "0123456789"


class TestPhoneIntervals:
    def test_fixture(self):
        tiers = parse_textgrid(LONG_FIXTURE)
        pairs = phone_intervals(tiers)
        assert [(p, iv.xmin) for p, iv in pairs] == [("AA", 0.25), ("T", 0.5)]

    def test_silence_only_tier(self):
        tier = Tier("phones", (Interval("sil", 0.0, 1.0),), 0.0, 1.0)
        assert phone_intervals([tier]) == []

    def test_words_tier(self):
        tiers = parse_textgrid(LONG_FIXTURE)
        pairs = phone_intervals(tiers, tier_name="words")
        assert [p for p, _ in pairs] == ["TEA"]

    def test_missing_tier_names_available(self):
        tiers = parse_textgrid(LONG_FIXTURE)
        with pytest.raises(KeyError, match="phones.*words"):
            phone_intervals(tiers, tier_name="syllables")

    @given(
        st.lists(
            st.sampled_from(["sil", "sp", "", "AA1", "T", "b2", "spn", "IY0"]),
            min_size=1,
            max_size=8,
        )
    )
    def test_output_clean(self, labels):
        intervals = tuple(
            Interval(lab, i * 0.1, (i + 1) * 0.1) for i, lab in enumerate(labels)
        )
        tier = Tier("phones", intervals, 0.0, len(labels) * 0.1)
        for p, _ in phone_intervals([tier]):
            assert p != SILENCE
            assert not p[-1].isdigit()
