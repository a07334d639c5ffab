from core.chart_atlas import main_key, rho_divisor
from .base import RoundStage


class EthStage(RoundStage):
    """ð-роздуття для B_(kτ): Y⁺ = X_(u_τ,v_τ), Y⁻: ϖ- або винятковий дивізор мінус-члена."""
    name = "eth"

    def candidates(self, k: int, tau: int):
        model, registry = self.run.model, self.run.registry
        plus = [rho_divisor(model.relation(k).terms[tau].pair)]
        minus = [y for y in registry.associated(main_key("-", k, tau))
                 if y[0] in ("varpi", "exc") and y != rho_divisor(model.lead_pair(k))]
        return plus, minus
