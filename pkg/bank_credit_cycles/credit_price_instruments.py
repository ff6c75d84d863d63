from base_credit_node import BaseCreditNode
from griptape_nodes.exe_types.core_types import Parameter, ParameterMode
from griptape_nodes.retained_mode.griptape_nodes import logger

from bank import FundingMode, max_projects
from errors import CreditCycleError
from instruments import cds_basis, expected_loan_payoff, fair_cds_spread, hedged_loan_payoff
from market import classify_regime, clear_market
from strategy import plan_period, quote_actions


class CreditPriceInstruments(BaseCreditNode):
    """Prices the loan, the securitized loan and the CDS of a scenario at its t=1 market."""

    def __init__(self, **kwargs) -> None:
        super().__init__(**kwargs)
        self._add_scenario_input()

        self.add_parameter(
            Parameter(
                name="prices",
                type="json",
                default_value={},
                allowed_modes={ParameterMode.OUTPUT},
                tooltip="Fee, skin in the game, fundamental and cleared prices, spreads and basis",
                ui_options={"hide_property": True},
            )
        )
        self.add_parameter(
            Parameter(
                name="quotes",
                type="json",
                default_value=[],
                allowed_modes={ParameterMode.OUTPUT},
                tooltip="Expected profit per unit of every action at the t=1 price",
                ui_options={"hide_property": True},
            )
        )
        self.add_parameter(
            Parameter(
                name="best_action",
                type="str",
                default_value="",
                allowed_modes={ParameterMode.OUTPUT},
                tooltip="Best-quoted action among those the scenario allows",
            )
        )
        self.add_parameter(
            Parameter(
                name="funding_capacity",
                type="json",
                default_value={},
                allowed_modes={ParameterMode.OUTPUT},
                tooltip="Projects the initial equity can finance in each funding mode",
                ui_options={"hide_property": True},
            )
        )

    def process(self) -> None:
        try:
            config = self._get_scenario()
        except CreditCycleError as e:
            logger.error(f"{self.name}: Invalid scenario: {e}")
            return

        try:
            project, terms, flags = config.project, config.terms, config.flags
            market = clear_market(config.fundamental, config.sentiment.psi, 0.0, 0.0)
            regime = classify_regime(market.cleared_price, config.fundamental, config.eps)

            prices = {
                "fee": config.fee,
                "skin_in_game": config.d,
                "fundamental_price": config.fundamental,
                "cleared_price_t1": market.cleared_price,
                "regime_t1": regime.tag.value,
                "fair_cds_spread": fair_cds_spread(project, terms),
                "cds_spread": terms.market_spread,
                "cds_basis": cds_basis(terms, config.fee),
                "expected_loan_payoff": expected_loan_payoff(project, terms),
                "hedged_loan_payoff": hedged_loan_payoff(project, terms),
            }

            haircut = config.regulatory.h if flags.leverage else None
            quotes = quote_actions(
                market, project, terms, config.fee, config.d, include_naked=flags.naked_cds, haircut=haircut
            )
            steps = plan_period(regime, market, project, terms, config.fee, config.d, flags, haircut=haircut)

            capacity = {
                mode.value: max_projects(config.E0, config.d, config.regulatory.h, mode) for mode in FundingMode
            }

            self._set_outputs(
                {
                    "prices": prices,
                    "quotes": [
                        {
                            "action": q.action.value,
                            "expected_profit": q.expected_profit,
                            "capital_required": q.capital_required,
                            "notes": q.notes,
                        }
                        for q in quotes
                    ],
                    "best_action": steps[-1][0].value,
                    "funding_capacity": capacity,
                }
            )
            logger.info(f"{self.name}: t=1 market {regime.tag.value} at {market.cleared_price:.6g}")
        except Exception as e:
            logger.error(f"{self.name}: Failed to price instruments: {e}")
