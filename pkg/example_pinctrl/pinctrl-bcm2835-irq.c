/*
 * IRQ plumbing for the reduced BCM2835 pin controller: enabling a GPIO
 * interrupt sets the matching bit in the per-bank rising-edge register.
 */

#include "pinctrl-bcm2835.h"

static void bcm2835_gpio_irq_config(struct bcm2835_pinctrl *pc, unsigned gpio,
				    unsigned enable)
{
	unsigned bank = GPIO_REG_OFFSET(gpio);
	u32 reg;

	reg = bcm2835_gpio_rd(pc, GPREN0 + 4 * bank);
	if (enable)
		reg |= BIT(GPIO_REG_SHIFT(gpio));
	else
		reg &= ~BIT(GPIO_REG_SHIFT(gpio));
	bcm2835_gpio_wr(pc, GPREN0 + 4 * bank, reg);
}

void bcm2835_gpio_irq_enable(struct irq_data *data)
{
	struct bcm2835_pinctrl *pc = &pc_storage;
	unsigned gpio = irqd_to_hwirq(data);
	unsigned offset = GPIO_REG_SHIFT(gpio);
	unsigned bank = GPIO_REG_OFFSET(gpio);
	unsigned long flags;

	raw_spin_lock_irqsave(&pc->irq_lock[bank], flags);
	set_bit(offset, &pc->enabled_irq_map[bank]);
	bcm2835_gpio_irq_config(pc, gpio, 1);
	raw_spin_unlock_irqrestore(&pc->irq_lock[bank], flags);
}
