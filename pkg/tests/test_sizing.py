from dataclasses import replace

import pytest

from h2blackstart.blackstart.sizing import (
    AuxLoad,
    AuxLoadTable,
    aux_ratio,
    build_blackstart_network,
    hydrogen_aux_load,
    pemfc_rating,
    required_blackstart_power,
    scenario_loads,
    size,
    wind_aux_load,
)
from h2blackstart.config.config import Config
from h2blackstart.domain.constants import BusRole
from h2blackstart.domain.exceptions import InvalidInputError
from tests.utils import resource


class TestAuxLoads:
    def test_wind_aux_load(self):
        assert wind_aux_load(6.25, 0.05) == pytest.approx(0.3125)
        assert wind_aux_load(0.0, 0.05) == 0.0

    def test_measured_ratios(self, paper_case):
        tables = paper_case.sizing.wind_aux_tables
        ratios = [aux_ratio(table, 1.5) for table in tables]

        assert tables[0].total_kw == pytest.approx(78.6)
        assert ratios == pytest.approx([0.0524, 0.041, 0.05], abs=1e-4)

    def test_aux_ratio_requires_rating(self):
        with pytest.raises(InvalidInputError):
            aux_ratio(AuxLoadTable(), 0.0)

    def test_hydrogen_total(self, paper_case):
        assert hydrogen_aux_load(paper_case.sizing.hydrogen_aux) == pytest.approx(1.6345)

    def test_hydrogen_empty(self):
        assert hydrogen_aux_load(AuxLoadTable()) == 0.0

    def test_hydrogen_count_resummed(self, paper_case):
        table = paper_case.sizing.hydrogen_aux.with_count("alkali circulation pump", 2)

        assert hydrogen_aux_load(table) == pytest.approx(1.6345 + 0.065)

    def test_entry_invariants(self):
        with pytest.raises(InvalidInputError):
            AuxLoad("pump", rated_kw=-1.0)
        with pytest.raises(InvalidInputError):
            AuxLoad("pump", rated_kw=1.0, count=0)

    def test_scenario_loads(self, paper_case):
        loads = scenario_loads(paper_case.sizing)

        assert loads["wind_aux"] == pytest.approx(0.3125 + 0j)
        assert loads["lsc_standby"] == pytest.approx(0.04 + 0j)
        assert loads["hydrogen_aux"].real == pytest.approx(1.6345 + 0.39)
        assert loads["hydrogen_aux"].imag == pytest.approx(0.86)


class TestBuildNetwork:
    def test_six_buses_one_reference(self, paper_case):
        network = build_blackstart_network(paper_case.sizing)

        assert network.n_buses == 6
        assert network.buses_with_role(BusRole.REFERENCE) == [network.index_of("bus5")]

    def test_loads_placed(self, paper_case):
        network = build_blackstart_network(paper_case.sizing)
        dfig = network.buses[network.index_of("bus2")]
        wind = network.buses[network.index_of("bus1")]

        assert dfig.p_inject * network.s_base == pytest.approx(-0.04)
        assert dfig.q_inject == 0.0
        assert wind.p_inject * network.s_base == pytest.approx(-0.3125)

    def test_rebase_gives_same_requirement(self, paper_case):
        sizing = paper_case.sizing
        rebased = replace(sizing, network_template=sizing.network_template.rebase(20.0))

        original = required_blackstart_power(sizing)
        doubled = required_blackstart_power(rebased)

        assert doubled.p_mw == pytest.approx(original.p_mw, rel=1e-6)
        assert doubled.q_mvar == pytest.approx(original.q_mvar, rel=1e-6)

    def test_shared_buses_rejected(self, paper_case):
        sizing = paper_case.sizing
        buses = replace(sizing.buses, dfig=sizing.buses.wind_aux)

        with pytest.raises(InvalidInputError):
            build_blackstart_network(replace(sizing, buses=buses))


class TestRequiredPower:
    def test_paper_case(self, paper_case):
        power = required_blackstart_power(paper_case.sizing)

        assert power.p_mw == pytest.approx(2.38, rel=0.05)
        assert power.q_mvar == pytest.approx(0.91, rel=0.05)

    def test_nothing_to_supply(self):
        scenario = Config.read(resource("zero-load.yaml")).parse()
        power = required_blackstart_power(scenario.sizing)

        assert power.p_mw == pytest.approx(0.0, abs=1e-12)
        assert power.q_mvar == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize(
        "field, values",
        [
            ("wind_aux_ratio", [0.02, 0.05, 0.08, 0.12]),
            ("lsc_standby_power", [0.0, 0.04, 0.1, 0.2]),
            ("secondary_load", [0.0, 0.2, 0.39, 0.6]),
        ],
    )
    def test_monotonic_in_loads(self, paper_case, field, values):
        sizing = paper_case.sizing
        p = [
            required_blackstart_power(replace(sizing, **{field: value})).p_mw
            for value in values
        ]

        assert all(b >= a for a, b in zip(p, p[1:]))

    def test_monotonic_in_hydrogen_table(self, paper_case):
        sizing = paper_case.sizing
        p = [
            required_blackstart_power(
                replace(sizing, hydrogen_aux=sizing.hydrogen_aux.with_count("lighting box", n))
            ).p_mw
            for n in (1, 2, 4, 8)
        ]

        assert all(b >= a for a, b in zip(p, p[1:]))

    def test_doubled_hydrogen_load_adds_at_least_itself(self, paper_case):
        sizing = paper_case.sizing
        doubled_entries = tuple(replace(e, count=2 * e.count) for e in sizing.hydrogen_aux.entries)
        doubled = replace(sizing, hydrogen_aux=replace(sizing.hydrogen_aux, entries=doubled_entries))

        before = required_blackstart_power(sizing).p_mw
        after = required_blackstart_power(doubled).p_mw

        assert after - before >= 1.6345


class TestPemfcRating:
    def test_published_rating(self):
        assert pemfc_rating(2.38, 0.91, 0.30, 0.5) == 3.0

    def test_zero(self):
        assert pemfc_rating(0.0, 0.0, 0.3, 0.5) == 0.0

    def test_fine_granularity(self):
        assert pemfc_rating(1.0, 0.0, 0.30, 0.1) == pytest.approx(1.3)

    def test_invalid(self):
        with pytest.raises(InvalidInputError):
            pemfc_rating(1.0, 0.0, 0.3, 0.0)
        with pytest.raises(InvalidInputError):
            pemfc_rating(-1.0, 0.0, 0.3, 0.5)


class TestSize:
    def test_paper_case_report(self, paper_sizing):
        assert paper_sizing.p_min == pytest.approx(2.38, rel=0.05)
        assert paper_sizing.q_min == pytest.approx(0.91, rel=0.05)
        assert paper_sizing.rating == 3.0
        assert paper_sizing.rating > paper_sizing.p_min
        assert paper_sizing.s_min == pytest.approx(
            (paper_sizing.p_min**2 + paper_sizing.q_min**2) ** 0.5
        )

    def test_margin_override(self, paper_case):
        assert size(paper_case.sizing, margin=0.5).rating == 3.5

    def test_loss_signs(self, paper_sizing):
        losses = paper_sizing.losses

        assert losses.transformer_excitation_mvar == pytest.approx(0.08, rel=0.5)
        assert losses.line_charging_mvar == pytest.approx(-0.03, rel=0.5)
        assert losses.lsc_standby_mw == pytest.approx(0.04, rel=0.25)
        assert losses.series_loss_mw > 0.0

    def test_self_consistency(self, paper_sizing):
        solution = paper_sizing.solution
        losses = solution.to_mva(solution.loss_total).real

        assert paper_sizing.p_min == pytest.approx(paper_sizing.load_total_mw + losses, abs=1e-6)

    def test_reactive_decomposition(self, paper_sizing):
        losses = paper_sizing.losses
        total = paper_sizing.solution.to_mva(paper_sizing.solution.loss_total).imag

        assert total == pytest.approx(
            losses.series_loss_mvar
            + losses.transformer_excitation_mvar
            + losses.line_charging_mvar,
            abs=1e-9,
        )
