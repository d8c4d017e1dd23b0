package shop.payments;

public class CardPaymentGateway implements PaymentGateway {
    private String merchantId;

    public boolean charge(String reference, double amount) {
        return authorize(reference) && capture(amount);
    }

    private boolean authorize(String reference) {
        return reference != null;
    }

    private boolean capture(double amount) {
        return amount > 0;
    }
}
