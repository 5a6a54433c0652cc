"""System models for the bcm2835 pin controller SSI.

Only four models actually influence the values written to the GPIO block:
writel, readl, devm_ioremap_resource and of_address_to_resource (plus
irqd_to_hwirq which feeds the enable-irq command argument in). The spinlock,
bitmap and logging models are no-ops kept so the interpreter does not log
them as missing.
"""

import os

from ssi.dtsi import dtsi_find

DTSI = os.path.join(os.path.dirname(os.path.abspath(__file__)), "bcm283x.dtsi")

NUM_GPIOS = 58


def register(session):
    def writel(ctx):
        ctx.write_through(ctx.args[1], ctx.args[0])

    def readl(ctx):
        return ctx.read_through(ctx.args[0], width_bytes=4)

    def devm_ioremap_resource(ctx):
        base = ctx.read_through(ctx.args[1], width_bytes=4)
        label = "ioremap:" + (ctx.session.chosen_compatible or "device")
        return ctx.map_mmio(label, base, size=0xB4)

    def of_address_to_resource(ctx):
        addr, _size = dtsi_find(DTSI, ctx.session.chosen_compatible)
        ctx.exec_snippet("*{0} = {1}", [ctx.args[2], ctx.make_concrete(32, addr)])
        return ctx.emit_sexpr("(str (imm {0}))", [0])

    def irqd_to_hwirq(ctx):
        gpio = ctx.session.command_params.get("gpio")
        if gpio is None:
            return ctx.fresh_symbolic("ret:irqd_to_hwirq")
        if gpio < 0 or gpio >= NUM_GPIOS:
            ctx.log(f"gpio {gpio} out of range [0, {NUM_GPIOS - 1}]")
        return ctx.make_concrete(32, gpio)

    def noop(ctx):
        return ctx.make_concrete(32, 0)

    session.register_hook("writel", writel, doc="MMIO register write")
    session.register_hook("readl", readl, doc="MMIO register read")
    session.register_hook("devm_ioremap_resource", devm_ioremap_resource,
                          doc="map the device's register window")
    session.register_hook("of_address_to_resource", of_address_to_resource,
                          doc="fill a resource from the device tree")
    session.register_hook("irqd_to_hwirq", irqd_to_hwirq,
                          doc="hardware irq number of an irq_data")
    for name in ("raw_spin_lock_irqsave", "raw_spin_unlock_irqrestore",
                 "set_bit", "platform_set_drvdata", "dev_err", "dev_info"):
        session.register_hook(name, noop, doc="no-op")
