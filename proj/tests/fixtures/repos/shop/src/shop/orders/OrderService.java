package shop.orders;

import shop.payments.PaymentGateway;

public class OrderService {
    private final OrderRepository repository;
    private final PaymentGateway gateway;

    public OrderService(OrderRepository repository, PaymentGateway gateway) {
        this.repository = repository;
        this.gateway = gateway;
    }

    public Order placeOrder(Order order) {
        double amount = order.computeTotal();
        gateway.charge(order.getId(), amount);
        repository.save(order);
        notifyCustomer(order);
        return order;
    }

    private void notifyCustomer(Order order) {
        System.out.println("placed " + order.getId());
    }
}
