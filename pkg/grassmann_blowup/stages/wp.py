from core.chart_atlas import main_key, render_label, rho_divisor
from .base import RoundStage


class WpStage(RoundStage):
    """
    ℘-роздуття для B_(kτ): Y⁺ пов'язаний з плюс-членом (крім X_(u_τ,v_τ)),
    Y⁻ пов'язаний з мінус-членом (крім X_(m,u_k)).
    """
    name = "wp"

    def candidates(self, k: int, tau: int):
        model, registry = self.run.model, self.run.registry
        term_pair = model.relation(k).terms[tau].pair
        plus = [y for y in registry.associated(main_key("+", k, tau)) if y != rho_divisor(term_pair)]
        minus = [y for y in registry.associated(main_key("-", k, tau)) if y != rho_divisor(model.lead_pair(k))]
        for label in plus + minus:
            if label[0] == "rho":
                self.run.note(f"wp({k},{tau}): ϱ-divisor candidate {render_label(label)}")
        return plus, minus
