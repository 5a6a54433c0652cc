/*
 * Reduced re-creation of the BCM2835 pin controller driver, written from
 * scratch for interpretation in isolation: same call structure, register
 * map, and helper macros as the real driver's probe and IRQ-enable paths.
 */

#include <linux/platform_device.h>
#include <linux/io.h>
#include <linux/of_address.h>

#define MODULE_NAME "pinctrl-bcm2835"

#define BCM2835_NUM_BANKS 2
#define BCM2835_NUM_GPIOS 58

/* GPIO register offsets from the pin controller base. */
#define GPREN0  0x4c
#define GPFEN0  0x58
#define GPHEN0  0x64
#define GPLEN0  0x70
#define GPAREN0 0x7c
#define GPAFEN0 0x88

#define GPIO_REG_OFFSET(p) ((p) / 32)
#define GPIO_REG_SHIFT(p)  ((p) % 32)
#define BIT(n) (1 << (n))

struct bcm2835_pinctrl {
	void *base;
	raw_spinlock_t irq_lock[BCM2835_NUM_BANKS];
	unsigned long enabled_irq_map[BCM2835_NUM_BANKS];
};

static struct bcm2835_pinctrl pc_storage;

void bcm2835_gpio_wr(struct bcm2835_pinctrl *pc, unsigned reg, u32 val)
{
	writel(val, pc->base + reg);
}

u32 bcm2835_gpio_rd(struct bcm2835_pinctrl *pc, unsigned reg)
{
	return readl(pc->base + reg);
}

int bcm2835_pinctrl_probe(struct platform_device *pdev)
{
	struct bcm2835_pinctrl *pc = &pc_storage;
	struct device *dev = &pdev->dev;
	struct device_node *np = dev->of_node;
	struct resource iomem;
	int err;
	int i;

	err = of_address_to_resource(np, 0, &iomem);
	pc->base = devm_ioremap_resource(dev, &iomem);

	/* Start from a clean slate: mask every IRQ event source per bank. */
	for (i = 0; i < BCM2835_NUM_BANKS; i++) {
		bcm2835_gpio_wr(pc, GPREN0 + i * 4, 0);
		bcm2835_gpio_wr(pc, GPFEN0 + i * 4, 0);
		bcm2835_gpio_wr(pc, GPHEN0 + i * 4, 0);
		bcm2835_gpio_wr(pc, GPLEN0 + i * 4, 0);
		bcm2835_gpio_wr(pc, GPAREN0 + i * 4, 0);
		bcm2835_gpio_wr(pc, GPAFEN0 + i * 4, 0);
	}

	platform_set_drvdata(pdev, pc);

	return 0;
}

MODULE_DESCRIPTION("Broadcom BCM2835/2711 pinctrl and GPIO driver");
MODULE_AUTHOR("Chris Boot");
MODULE_AUTHOR("Simon Arlott");
MODULE_AUTHOR("Stephen Warren");
MODULE_LICENSE("GPL");
